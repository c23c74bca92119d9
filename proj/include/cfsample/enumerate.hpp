#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfsample/forest.hpp"
#include "cfsample/grammar.hpp"

namespace cfsample {

/// Tree totals grow exponentially in the string length, so every index
/// computation runs on arbitrary-precision integers.
using TreeCount = boost::multiprecision::cpp_int;

struct DerivationTree;
using DerivationTreePtr = std::shared_ptr<const DerivationTree>;

/// One concrete derivation. Zero children: a terminal leaf. One child: a
/// nonterminal expanded by a terminal rule (the epsilon half of the pair is
/// elided on decode). Two children: a binary expansion.
struct DerivationTree {
  SymbolId symbol = kEpsilonId;
  std::vector<DerivationTreePtr> children;
};

DerivationTreePtr make_tree(SymbolId symbol, std::vector<DerivationTreePtr> children = {});

/// Canonical serialization: terminal leaves print their token, internal nodes
/// print "(Name child ...)". Equal trees serialize equally and vice versa.
std::string to_sexpr(const DerivationTree& t, const CNFGrammar& g);

/// Left-to-right terminal tokens.
std::vector<std::string> yield_of(const DerivationTree& t, const CNFGrammar& g);

/// Per-node derivation totals and prefix sums over child pairs, memoized for
/// the whole DAG in one bottom-up pass. Immutable afterwards, so any number
/// of decoding threads may read it concurrently.
class CountTable {
 public:
  explicit CountTable(const ForestNodePtr& root);

  /// 1 for leaves, otherwise the sum over pairs of count(l)*count(r).
  const TreeCount& count(const ForestNode* t) const;

  /// F[p] = sum over pairs 0..p of count(l)*count(r); F.back() == count(t).
  /// Empty for leaves.
  const std::vector<TreeCount>& prefix_sums(const ForestNode* t) const;

 private:
  struct Entry {
    TreeCount total;
    std::vector<TreeCount> sums;
  };
  std::unordered_map<const ForestNode*, Entry> entries_;
};

/// count of the root, or 0 for a null root (no derivations).
TreeCount count_trees(const ForestNodePtr& root);

/// Least p with i < F[p], plus the residual q measured from the end of the
/// previous block (blocks are half-open). Throws std::out_of_range with
/// "index out of bounds" unless 0 <= i < F.back().
std::pair<std::size_t, TreeCount> select_pair(const std::vector<TreeCount>& F,
                                              const TreeCount& i);

/// Unranking: the i-th derivation of t under the fixed child order. Bijective
/// on 0 <= i < count(t); out-of-range indices throw std::out_of_range.
DerivationTreePtr phi(const ForestNodePtr& t, const TreeCount& i, const CountTable& counts);

}  // namespace cfsample
