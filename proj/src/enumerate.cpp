#include "cfsample/enumerate.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace cfsample {

DerivationTreePtr make_tree(SymbolId symbol, std::vector<DerivationTreePtr> children) {
  auto t = std::make_shared<DerivationTree>();
  t->symbol = symbol;
  t->children = std::move(children);
  return t;
}

namespace {

void sexpr_into(const DerivationTree& t, const CNFGrammar& g, std::string& out) {
  if (t.children.empty()) {
    out += g.name(t.symbol);
    return;
  }
  out += '(';
  out += g.name(t.symbol);
  for (const auto& c : t.children) {
    out += ' ';
    sexpr_into(*c, g, out);
  }
  out += ')';
}

void yield_into(const DerivationTree& t, const CNFGrammar& g, std::vector<std::string>& out) {
  if (t.children.empty()) {
    out.push_back(g.name(t.symbol));
    return;
  }
  for (const auto& c : t.children) yield_into(*c, g, out);
}

}  // namespace

std::string to_sexpr(const DerivationTree& t, const CNFGrammar& g) {
  std::string out;
  sexpr_into(t, g, out);
  return out;
}

std::vector<std::string> yield_of(const DerivationTree& t, const CNFGrammar& g) {
  std::vector<std::string> out;
  yield_into(t, g, out);
  return out;
}

CountTable::CountTable(const ForestNodePtr& root) {
  if (!root) return;

  // Children precede parents in a DFS postorder of a DAG, so one linear pass
  // over `order` sees every pair's counts before the pair's owner.
  std::vector<const ForestNode*> order;
  std::unordered_set<const ForestNode*> seen;
  std::vector<std::pair<const ForestNode*, bool>> stack{{root.get(), false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      order.push_back(node);
      continue;
    }
    if (!seen.insert(node).second) continue;
    stack.emplace_back(node, true);
    for (const auto& [l, r] : node->children) {
      stack.emplace_back(l.get(), false);
      stack.emplace_back(r.get(), false);
    }
  }

  for (const ForestNode* node : order) {
    Entry e;
    if (node->children.empty()) {
      e.total = 1;
    } else {
      e.sums.reserve(node->children.size());
      TreeCount acc = 0;
      for (const auto& [l, r] : node->children) {
        acc += entries_.at(l.get()).total * entries_.at(r.get()).total;
        e.sums.push_back(acc);
      }
      e.total = acc;
    }
    entries_.emplace(node, std::move(e));
  }
}

const TreeCount& CountTable::count(const ForestNode* t) const {
  return entries_.at(t).total;
}

const std::vector<TreeCount>& CountTable::prefix_sums(const ForestNode* t) const {
  return entries_.at(t).sums;
}

TreeCount count_trees(const ForestNodePtr& root) {
  if (!root) return 0;
  return CountTable(root).count(root.get());
}

std::pair<std::size_t, TreeCount> select_pair(const std::vector<TreeCount>& F,
                                              const TreeCount& i) {
  if (i < 0 || F.empty() || i >= F.back()) throw std::out_of_range("index out of bounds");
  auto it = std::upper_bound(F.begin(), F.end(), i);
  auto p = static_cast<std::size_t>(it - F.begin());
  TreeCount q = p == 0 ? i : i - F[p - 1];
  return {p, std::move(q)};
}

DerivationTreePtr phi(const ForestNodePtr& t, const TreeCount& i, const CountTable& counts) {
  if (t->children.empty()) {
    if (i != 0) throw std::out_of_range("index out of bounds");
    return make_tree(t->root);
  }
  auto [p, q] = select_pair(counts.prefix_sums(t.get()), i);
  const auto& [l, r] = t->children[p];
  if (is_epsilon(*r)) return make_tree(t->root, {make_tree(l->root)});
  const TreeCount& cr = counts.count(r.get());
  TreeCount q1 = q / cr;
  TreeCount q2 = q % cr;
  return make_tree(t->root, {phi(l, q1, counts), phi(r, q2, counts)});
}

}  // namespace cfsample
