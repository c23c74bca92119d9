#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "cfsample/grammar.hpp"
#include "cfsample/recognizer.hpp"

namespace cfsample {

struct ForestNode;
using ForestNodePtr = std::shared_ptr<const ForestNode>;
using ChildPair = std::pair<ForestNodePtr, ForestNodePtr>;

/// Packed forest node: a root symbol and the ordered alternatives of conjoined
/// child pairs. A node without children is a terminal or epsilon leaf. Child
/// pairs reference (not copy) the nodes of smaller spans, so a forest is a DAG.
///
/// Children are ordered by (binary-rule index, split position ascending);
/// terminal alternatives by terminal-rule index. Unranking depends on this
/// order being stable.
struct ForestNode {
  SymbolId root = kEpsilonId;
  std::vector<ChildPair> children;
};

/// Root-indexed dictionary of forest nodes. A missing key is the empty forest.
using ForestMap = std::map<SymbolId, ForestNodePtr>;

/// The shared epsilon sentinel: a leaf with count 1 and empty yield.
const ForestNodePtr& epsilon_leaf();
inline bool is_epsilon(const ForestNode& n) { return n.root == kEpsilonId; }

ForestNodePtr make_leaf(SymbolId terminal);

/// Forest of a single token: one entry per producing nonterminal, each with a
/// (terminal leaf, epsilon) child pair. A hole is the oplus-union over the
/// whole alphabet. Throws std::invalid_argument on unknown tokens.
ForestMap leaf_forest(std::string_view token, const CNFGrammar& g);

/// Key union; children of nodes under a shared key are concatenated, x first.
ForestMap oplus(const ForestMap& x, const ForestMap& z);

/// For every binary rule (w -> x z) with x in keys(X) and z in keys(Z), the
/// pair (X(x), Z(z)) joins w's alternatives, in rule order.
ForestMap otimes(const ForestMap& x, const ForestMap& z, const CNFGrammar& g);

struct ForestChart {
  std::size_t n = 0;
  std::vector<ForestMap> cells;

  ForestMap& at(std::size_t i, std::size_t j) { return cells[index(i, j)]; }
  const ForestMap& at(std::size_t i, std::size_t j) const { return cells[index(i, j)]; }
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * n - i * (i - 1) / 2 + (j - i - 1);
  }
};

/// Forest-valued analogue of build_set_chart, same anti-diagonal schedule.
ForestChart build_forest_chart(const CNFGrammar& g, const PorousString& s,
                               Schedule sched = Schedule::parallel);

/// The top-right cell: all parses of every completion of s.
ForestMap build_forest(const CNFGrammar& g, const PorousString& s);

/// The start-symbol entry, or null when s has no parse (recognize == false).
ForestNodePtr root_forest(const ForestMap& f, const CNFGrammar& g);

/// Checks every reachable child pair is rule-licensed and node widths are
/// consistent; returns the root width (token count), or -1 when invalid.
long forest_width(const ForestNodePtr& root, const CNFGrammar& g);

}  // namespace cfsample
