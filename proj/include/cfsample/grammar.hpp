#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cfsample {

// Reserved hole marker. Never a grammar terminal or nonterminal.
inline constexpr std::string_view kHoleToken = "_";

enum class SymbolKind { terminal, nonterminal };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::terminal;
  bool operator==(const Symbol&) const = default;
};

struct Production {
  std::string lhs;
  std::vector<Symbol> rhs; // empty rhs denotes an epsilon production
};

/// Error while reading a grammar file. `line` is 1-based.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_no)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

struct GrammarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// User-facing grammar as written: arbitrary-arity productions in textual order.
struct Grammar {
  std::vector<std::string> nonterminals; // first-appearance order
  std::vector<std::string> terminals;    // first-appearance order
  std::vector<Production> productions;
  std::string start;

  bool is_nonterminal(std::string_view name) const;
  bool is_terminal(std::string_view name) const;

  /// Checks the structural invariants (symbol sets disjoint, lhs/rhs membership,
  /// start defined, no reserved tokens). Throws GrammarError.
  void validate() const;
};

/// Reads the grammar file format: one `LHS -> alt1 | alt2` production per line,
/// whitespace-separated symbols, `#` comments, blank lines ignored. A symbol is a
/// nonterminal iff it appears on some LHS; the first LHS is the start symbol.
/// An empty alternative denotes epsilon.
Grammar parse_grammar(std::string_view text);

// Symbols of a CNFGrammar are interned: nonterminals get ids 0..N-1,
// terminals N..N+T-1. The epsilon sentinel is its own id.
using SymbolId = std::int32_t;
inline constexpr SymbolId kEpsilonId = -1;

struct BinaryRule {
  SymbolId lhs, left, right; // lhs -> left right, all nonterminals
  bool operator==(const BinaryRule&) const = default;
};

struct TerminalRule {
  SymbolId lhs;  // nonterminal
  SymbolId term; // terminal
  bool operator==(const TerminalRule&) const = default;
};

/// Chomsky-normal-form grammar: every rule is `w -> x z` or `w -> t`.
/// Rule order is deterministic given the source grammar; counting and
/// unranking depend on it.
class CNFGrammar {
 public:
  CNFGrammar(std::vector<std::string> nonterminal_names, std::vector<std::string> terminal_names,
             std::vector<BinaryRule> binary, std::vector<TerminalRule> terminal, SymbolId start);

  SymbolId start() const { return start_; }
  std::size_t nonterminal_count() const { return nonterminal_names_.size(); }
  std::size_t terminal_count() const { return terminal_names_.size(); }

  bool is_nonterminal_id(SymbolId id) const {
    return id >= 0 && id < static_cast<SymbolId>(nonterminal_names_.size());
  }
  bool is_terminal_id(SymbolId id) const {
    return id >= static_cast<SymbolId>(nonterminal_names_.size()) &&
           id < static_cast<SymbolId>(nonterminal_names_.size() + terminal_names_.size());
  }

  const std::string& name(SymbolId id) const;
  std::optional<SymbolId> id_of(std::string_view name) const;
  /// Id of a terminal token, or nullopt when the token is not in the alphabet.
  std::optional<SymbolId> terminal_id(std::string_view token) const;

  const std::vector<BinaryRule>& binary_rules() const { return binary_rules_; }
  const std::vector<TerminalRule>& terminal_rules() const { return terminal_rules_; }

  /// All nonterminals w with a rule w -> t, in terminal-rule order.
  /// Unknown tokens yield the empty set (the token is simply unmatchable).
  std::vector<SymbolId> terminal_producers(std::string_view token) const;
  std::vector<SymbolId> terminal_producers(SymbolId term) const;

  /// Indices into terminal_rules() whose rhs is `term`.
  const std::vector<int>& terminal_rule_indices(SymbolId term) const;

  std::string rule_to_string(const BinaryRule& r) const;
  std::string rule_to_string(const TerminalRule& r) const;

 private:
  std::vector<std::string> nonterminal_names_;
  std::vector<std::string> terminal_names_;
  std::vector<BinaryRule> binary_rules_;
  std::vector<TerminalRule> terminal_rules_;
  SymbolId start_;
  std::unordered_map<std::string, SymbolId> ids_;
  std::vector<std::vector<int>> rules_by_terminal_; // terminal-local index -> rule indices
};

/// Normalizes to CNF: terminal isolation, left-to-right binarization,
/// epsilon elimination, unit elimination, useless-rule pruning.
/// L(result) = L(g) \ {epsilon}; deterministic given g.
/// Throws GrammarError when the language minus epsilon is empty.
CNFGrammar to_cnf(const Grammar& g);

}  // namespace cfsample
