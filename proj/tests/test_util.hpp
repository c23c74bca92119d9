#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cfsample/enumerate.hpp"
#include "cfsample/forest.hpp"
#include "cfsample/grammar.hpp"
#include "cfsample/oracle.hpp"
#include "cfsample/recognizer.hpp"

namespace testutil {

using namespace cfsample;

// Balanced parentheses, as the user writes it.
inline constexpr const char* kDyck = "S -> S S | ( S ) | ( )\n";

// The same language entered already in normal form (Q = left-paren prefix).
inline constexpr const char* kDyckCnf = "S -> Q R | S S | L R\nQ -> L S\nL -> (\nR -> )\n";

// Ambiguous infix expressions over three terminals.
inline constexpr const char* kExpr = "E -> E + E | E * E | a\n";

inline CNFGrammar make_cnf(const char* text) { return to_cnf(parse_grammar(text)); }

inline PorousString ps(const std::string& text) { return PorousString::parse(text); }

inline std::string join(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += toks[i];
  }
  return out;
}

/// yield agrees with s on every fixed position (and has the same length).
inline bool completes(const std::vector<std::string>& y, const PorousString& s) {
  if (y.size() != s.size()) return false;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!s.is_hole(i) && y[i] != s.token(i)) return false;
  return true;
}

/// Internal nodes must correspond to grammar rules; leaves to terminals.
inline bool valid_derivation(const DerivationTree& t, const CNFGrammar& g) {
  if (t.children.empty()) return g.is_terminal_id(t.symbol);
  if (!g.is_nonterminal_id(t.symbol)) return false;
  if (t.children.size() == 1) {
    const auto& c = *t.children[0];
    if (!c.children.empty() || !g.is_terminal_id(c.symbol)) return false;
    for (const auto& r : g.terminal_rules())
      if (r.lhs == t.symbol && r.term == c.symbol) return true;
    return false;
  }
  if (t.children.size() != 2) return false;
  const auto& l = *t.children[0];
  const auto& r = *t.children[1];
  bool licensed = false;
  for (const auto& b : g.binary_rules())
    if (b.lhs == t.symbol && b.left == l.symbol && b.right == r.symbol) {
      licensed = true;
      break;
    }
  return licensed && valid_derivation(l, g) && valid_derivation(r, g);
}

/// Every porous string over the grammar's terminals: all hole masks for each
/// length, fixed positions filled pseudo-randomly, `fills` variants per mask.
inline std::vector<PorousString> sweep_instances(const CNFGrammar& g, std::size_t max_len,
                                                 int fills, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t sigma = g.terminal_count();
  std::vector<PorousString> out;
  for (std::size_t len = 1; len <= max_len; ++len)
    for (std::uint64_t mask = 0; mask < (1ull << len); ++mask)
      for (int f = 0; f < fills; ++f) {
        std::vector<std::string> toks(len);
        for (std::size_t p = 0; p < len; ++p)
          toks[p] = (mask >> p) & 1
                        ? std::string(kHoleToken)
                        : g.name(static_cast<SymbolId>(g.nonterminal_count() + rng() % sigma));
        out.emplace_back(std::move(toks));
      }
  return out;
}

/// All derivations of the root, decoded in index order.
inline std::vector<DerivationTreePtr> all_trees(const ForestNodePtr& root,
                                                const CountTable& counts) {
  std::vector<DerivationTreePtr> out;
  if (!root) return out;
  const TreeCount total = counts.count(root.get());
  for (TreeCount i = 0; i < total; ++i) out.push_back(phi(root, i, counts));
  return out;
}

inline std::vector<std::string> all_sexprs_sorted(const ForestNodePtr& root,
                                                  const CountTable& counts,
                                                  const CNFGrammar& g) {
  std::vector<std::string> out;
  for (const auto& t : all_trees(root, counts)) out.push_back(to_sexpr(*t, g));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testutil
