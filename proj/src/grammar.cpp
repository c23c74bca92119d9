#include "cfsample/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace cfsample {

namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void check_symbol_name(const std::string& n) {
  if (n.empty() || has_space(n)) throw GrammarError("invalid symbol name: '" + n + "'");
  if (n == kHoleToken) throw GrammarError("reserved token \"_\" used as a symbol");
}

}  // namespace

bool Grammar::is_nonterminal(std::string_view name) const {
  return std::find(nonterminals.begin(), nonterminals.end(), name) != nonterminals.end();
}

bool Grammar::is_terminal(std::string_view name) const {
  return std::find(terminals.begin(), terminals.end(), name) != terminals.end();
}

void Grammar::validate() const {
  for (const auto& n : nonterminals) check_symbol_name(n);
  for (const auto& t : terminals) check_symbol_name(t);
  for (const auto& t : terminals)
    if (is_nonterminal(t)) throw GrammarError("symbol is both terminal and nonterminal: " + t);
  if (productions.empty()) throw GrammarError("grammar has no productions");
  if (!is_nonterminal(start)) throw GrammarError("start symbol is not a nonterminal: " + start);
  for (const auto& p : productions) {
    if (!is_nonterminal(p.lhs)) throw GrammarError("production lhs is not a nonterminal: " + p.lhs);
    for (const auto& s : p.rhs) {
      if (s.kind == SymbolKind::nonterminal) {
        if (!is_nonterminal(s.name)) throw GrammarError("undefined nonterminal: " + s.name);
      } else if (!is_terminal(s.name)) {
        throw GrammarError("unknown terminal: " + s.name);
      }
    }
  }
}

Grammar parse_grammar(std::string_view text) {
  struct RawProd {
    std::string lhs;
    std::vector<std::string> rhs;
    int line;
  };
  std::vector<RawProd> raw;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line(text.substr(pos, eol == std::string_view::npos ? eol : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream iss(line);
    std::vector<std::string> tokens;
    for (std::string tok; iss >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    if (tokens.size() < 2 || tokens[1] != "->")
      throw ParseError("expected 'LHS -> alternatives'", line_no);
    if (tokens[0] == kHoleToken)
      throw ParseError("reserved token \"_\" used as a symbol", line_no);

    std::vector<std::string> alt;
    auto flush = [&] {
      raw.push_back({tokens[0], alt, line_no});
      alt.clear();
    };
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (tokens[i] == "|") {
        flush();
      } else if (tokens[i] == "->") {
        throw ParseError("unexpected '->'", line_no);
      } else if (tokens[i] == kHoleToken) {
        throw ParseError("reserved token \"_\" used as a symbol", line_no);
      } else {
        alt.push_back(tokens[i]);
      }
    }
    flush();
  }

  if (raw.empty()) throw GrammarError("grammar has no productions");

  Grammar g;
  g.start = raw.front().lhs;
  for (const auto& p : raw)
    if (!g.is_nonterminal(p.lhs)) g.nonterminals.push_back(p.lhs);
  for (const auto& p : raw)
    for (const auto& s : p.rhs)
      if (!g.is_nonterminal(s) && !g.is_terminal(s)) g.terminals.push_back(s);
  for (const auto& p : raw) {
    Production prod;
    prod.lhs = p.lhs;
    for (const auto& s : p.rhs)
      prod.rhs.push_back(
          {s, g.is_nonterminal(s) ? SymbolKind::nonterminal : SymbolKind::terminal});
    g.productions.push_back(std::move(prod));
  }
  g.validate();
  return g;
}

CNFGrammar::CNFGrammar(std::vector<std::string> nonterminal_names,
                       std::vector<std::string> terminal_names, std::vector<BinaryRule> binary,
                       std::vector<TerminalRule> terminal, SymbolId start)
    : nonterminal_names_(std::move(nonterminal_names)),
      terminal_names_(std::move(terminal_names)),
      binary_rules_(std::move(binary)),
      terminal_rules_(std::move(terminal)),
      start_(start) {
  for (std::size_t i = 0; i < nonterminal_names_.size(); ++i) {
    check_symbol_name(nonterminal_names_[i]);
    if (!ids_.emplace(nonterminal_names_[i], static_cast<SymbolId>(i)).second)
      throw GrammarError("duplicate symbol name: " + nonterminal_names_[i]);
  }
  for (std::size_t i = 0; i < terminal_names_.size(); ++i) {
    check_symbol_name(terminal_names_[i]);
    if (!ids_.emplace(terminal_names_[i],
                      static_cast<SymbolId>(nonterminal_names_.size() + i))
             .second)
      throw GrammarError("duplicate symbol name: " + terminal_names_[i]);
  }
  if (!is_nonterminal_id(start_)) throw GrammarError("start symbol is not a nonterminal");

  std::set<std::tuple<SymbolId, SymbolId, SymbolId>> bseen;
  for (const auto& r : binary_rules_) {
    if (!is_nonterminal_id(r.lhs) || !is_nonterminal_id(r.left) || !is_nonterminal_id(r.right))
      throw GrammarError("binary rule references a non-nonterminal symbol");
    if (!bseen.emplace(r.lhs, r.left, r.right).second)
      throw GrammarError("duplicate binary rule: " + rule_to_string(r));
  }
  rules_by_terminal_.resize(terminal_names_.size());
  std::set<std::pair<SymbolId, SymbolId>> tseen;
  for (std::size_t i = 0; i < terminal_rules_.size(); ++i) {
    const auto& r = terminal_rules_[i];
    if (!is_nonterminal_id(r.lhs) || !is_terminal_id(r.term))
      throw GrammarError("terminal rule has invalid symbols");
    if (!tseen.emplace(r.lhs, r.term).second)
      throw GrammarError("duplicate terminal rule: " + rule_to_string(r));
    rules_by_terminal_[r.term - nonterminal_names_.size()].push_back(static_cast<int>(i));
  }
}

const std::string& CNFGrammar::name(SymbolId id) const {
  static const std::string eps = "<eps>";
  if (id == kEpsilonId) return eps;
  if (is_nonterminal_id(id)) return nonterminal_names_[id];
  if (is_terminal_id(id)) return terminal_names_[id - nonterminal_names_.size()];
  throw std::out_of_range("invalid symbol id");
}

std::optional<SymbolId> CNFGrammar::id_of(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<SymbolId> CNFGrammar::terminal_id(std::string_view token) const {
  auto id = id_of(token);
  if (id && is_terminal_id(*id)) return id;
  return std::nullopt;
}

std::vector<SymbolId> CNFGrammar::terminal_producers(std::string_view token) const {
  auto id = terminal_id(token);
  if (!id) return {};
  return terminal_producers(*id);
}

std::vector<SymbolId> CNFGrammar::terminal_producers(SymbolId term) const {
  std::vector<SymbolId> out;
  for (int idx : terminal_rule_indices(term)) out.push_back(terminal_rules_[idx].lhs);
  return out;
}

const std::vector<int>& CNFGrammar::terminal_rule_indices(SymbolId term) const {
  if (!is_terminal_id(term)) throw std::out_of_range("not a terminal id");
  return rules_by_terminal_[term - nonterminal_names_.size()];
}

std::string CNFGrammar::rule_to_string(const BinaryRule& r) const {
  return name(r.lhs) + " -> " + name(r.left) + " " + name(r.right);
}

std::string CNFGrammar::rule_to_string(const TerminalRule& r) const {
  return name(r.lhs) + " -> " + name(r.term);
}

namespace {

// Working production during normalization; src is the index of the source
// production in the input grammar, used to derive fresh nonterminal names.
struct PProd {
  std::string lhs;
  std::vector<std::string> rhs;
  int src;
};

class NameGen {
 public:
  explicit NameGen(std::unordered_set<std::string> taken) : taken_(std::move(taken)) {}
  std::string fresh(std::string base) {
    while (taken_.count(base)) base += "'";
    taken_.insert(base);
    return base;
  }

 private:
  std::unordered_set<std::string> taken_;
};

}  // namespace

CNFGrammar to_cnf(const Grammar& g) {
  g.validate();

  std::unordered_set<std::string> terminals(g.terminals.begin(), g.terminals.end());
  std::unordered_set<std::string> taken(terminals);
  for (const auto& n : g.nonterminals) taken.insert(n);
  NameGen names(std::move(taken));

  std::vector<PProd> prods;
  for (std::size_t i = 0; i < g.productions.size(); ++i) {
    PProd p{g.productions[i].lhs, {}, static_cast<int>(i)};
    for (const auto& s : g.productions[i].rhs) p.rhs.push_back(s.name);
    prods.push_back(std::move(p));
  }

  // TERM: in rules of length >= 2, replace each terminal with a fresh
  // nonterminal deriving exactly that terminal. One isolator per terminal.
  std::map<std::string, std::string> iso;
  std::vector<PProd> iso_rules;
  for (auto& p : prods) {
    if (p.rhs.size() < 2) continue;
    for (auto& sym : p.rhs) {
      if (!terminals.count(sym)) continue;
      auto it = iso.find(sym);
      if (it == iso.end()) {
        std::string n = names.fresh("T_" + std::to_string(iso_rules.size()));
        it = iso.emplace(sym, n).first;
        iso_rules.push_back(PProd{n, {sym}, -1});
      }
      sym = it->second;
    }
  }
  for (auto& r : iso_rules) prods.push_back(std::move(r));

  // BIN: left-to-right binarization, grouping the leftmost pair first,
  // so A -> X Y Z becomes A -> B Z with B -> X Y. The top rule is emitted
  // before its auxiliary chain.
  std::vector<PProd> binned;
  for (auto& p : prods) {
    if (p.rhs.size() <= 2) {
      binned.push_back(std::move(p));
      continue;
    }
    int aux = 0;
    std::string prev = p.rhs[0];
    std::vector<PProd> chain;
    for (std::size_t j = 1; j + 1 < p.rhs.size(); ++j) {
      std::string b =
          names.fresh("B_" + std::to_string(p.src) + "_" + std::to_string(aux++));
      chain.push_back(PProd{b, {prev, p.rhs[j]}, p.src});
      prev = b;
    }
    binned.push_back(PProd{p.lhs, {prev, p.rhs.back()}, p.src});
    for (auto& c : chain) binned.push_back(std::move(c));
  }

  // DEL: epsilon elimination. Variants are generated in ascending drop-mask
  // order and deduplicated keep-first.
  std::unordered_set<std::string> nullable;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : binned) {
      if (nullable.count(p.lhs)) continue;
      bool all = true;
      for (const auto& s : p.rhs)
        if (terminals.count(s) || !nullable.count(s)) {
          all = false;
          break;
        }
      if (all) {
        nullable.insert(p.lhs);
        changed = true;
      }
    }
  }
  const bool eps_in_language = nullable.count(g.start) > 0;

  std::vector<PProd> delfree;
  std::set<std::pair<std::string, std::vector<std::string>>> seen_del;
  for (const auto& p : binned) {
    std::vector<std::size_t> npos;
    for (std::size_t j = 0; j < p.rhs.size(); ++j)
      if (!terminals.count(p.rhs[j]) && nullable.count(p.rhs[j])) npos.push_back(j);
    assert(npos.size() <= 2);
    for (unsigned mask = 0; mask < (1u << npos.size()); ++mask) {
      std::vector<std::string> rhs;
      std::size_t b = 0;
      for (std::size_t j = 0; j < p.rhs.size(); ++j) {
        if (b < npos.size() && npos[b] == j) {
          if (!(mask & (1u << b))) rhs.push_back(p.rhs[j]);
          ++b;
        } else {
          rhs.push_back(p.rhs[j]);
        }
      }
      if (rhs.empty()) continue;
      if (seen_del.emplace(p.lhs, rhs).second) delfree.push_back(PProd{p.lhs, rhs, p.src});
    }
  }

  // UNIT: a rule A -> B is replaced by the non-unit productions of every
  // nonterminal unit-reachable from B, inserted at the unit rule's position.
  auto is_unit = [&](const PProd& p) {
    return p.rhs.size() == 1 && !terminals.count(p.rhs[0]);
  };
  std::map<std::string, std::vector<int>> by_lhs;
  for (std::size_t i = 0; i < delfree.size(); ++i)
    by_lhs[delfree[i].lhs].push_back(static_cast<int>(i));

  std::vector<PProd> unitfree;
  std::set<std::pair<std::string, std::vector<std::string>>> seen_unit;
  auto add_rule = [&](const std::string& lhs, const std::vector<std::string>& rhs, int src) {
    if (seen_unit.emplace(lhs, rhs).second) unitfree.push_back(PProd{lhs, rhs, src});
  };
  for (const auto& p : delfree) {
    if (!is_unit(p)) {
      add_rule(p.lhs, p.rhs, p.src);
      continue;
    }
    std::vector<std::string> queue{p.rhs[0]};
    std::unordered_set<std::string> visited{p.rhs[0]};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      auto it = by_lhs.find(queue[qi]);
      if (it == by_lhs.end()) continue;
      for (int idx : it->second) {
        const PProd& q = delfree[idx];
        if (is_unit(q)) {
          if (visited.insert(q.rhs[0]).second) queue.push_back(q.rhs[0]);
        } else {
          add_rule(p.lhs, q.rhs, p.src);
        }
      }
    }
  }

  // PRUNE: drop rules that are not productive or not reachable from the start.
  std::unordered_set<std::string> productive;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : unitfree) {
      if (productive.count(p.lhs)) continue;
      bool ok = true;
      for (const auto& s : p.rhs)
        if (!terminals.count(s) && !productive.count(s)) {
          ok = false;
          break;
        }
      if (ok) {
        productive.insert(p.lhs);
        changed = true;
      }
    }
  }
  if (!productive.count(g.start))
    throw GrammarError(eps_in_language ? "grammar generates only the empty string"
                                       : "grammar generates the empty language");

  std::vector<PProd> prodfree;
  for (const auto& p : unitfree) {
    if (!productive.count(p.lhs)) continue;
    bool ok = true;
    for (const auto& s : p.rhs)
      if (!terminals.count(s) && !productive.count(s)) {
        ok = false;
        break;
      }
    if (ok) prodfree.push_back(p);
  }

  std::unordered_set<std::string> reachable{g.start};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : prodfree) {
      if (!reachable.count(p.lhs)) continue;
      for (const auto& s : p.rhs)
        if (!terminals.count(s) && reachable.insert(s).second) changed = true;
    }
  }
  std::vector<PProd> final_rules;
  for (auto& p : prodfree)
    if (reachable.count(p.lhs)) final_rules.push_back(std::move(p));

  // Intern nonterminals in appearance order, then assemble the rule lists.
  std::vector<std::string> nt_names;
  std::unordered_map<std::string, SymbolId> nt_id;
  auto intern = [&](const std::string& n) {
    auto [it, fresh] = nt_id.try_emplace(n, static_cast<SymbolId>(nt_names.size()));
    if (fresh) nt_names.push_back(n);
    return it->second;
  };
  for (const auto& p : final_rules) {
    intern(p.lhs);
    for (const auto& s : p.rhs)
      if (!terminals.count(s)) intern(s);
  }

  std::unordered_map<std::string, SymbolId> term_id;
  for (std::size_t i = 0; i < g.terminals.size(); ++i)
    term_id.emplace(g.terminals[i], static_cast<SymbolId>(nt_names.size() + i));

  std::vector<BinaryRule> bin;
  std::vector<TerminalRule> term;
  for (const auto& p : final_rules) {
    if (p.rhs.size() == 2) {
      bin.push_back({nt_id.at(p.lhs), nt_id.at(p.rhs[0]), nt_id.at(p.rhs[1])});
    } else {
      assert(p.rhs.size() == 1 && terminals.count(p.rhs[0]));
      term.push_back({nt_id.at(p.lhs), term_id.at(p.rhs[0])});
    }
  }
  return CNFGrammar(std::move(nt_names), g.terminals, std::move(bin), std::move(term),
                    nt_id.at(g.start));
}

}  // namespace cfsample
