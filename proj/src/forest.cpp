#include "cfsample/forest.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace cfsample {

const ForestNodePtr& epsilon_leaf() {
  static const ForestNodePtr eps = std::make_shared<const ForestNode>();
  return eps;
}

ForestNodePtr make_leaf(SymbolId terminal) {
  auto n = std::make_shared<ForestNode>();
  n->root = terminal;
  return n;
}

namespace {

ForestMap materialize(std::map<SymbolId, std::vector<ChildPair>>&& acc) {
  ForestMap out;
  for (auto& [w, pairs] : acc) {
    auto node = std::make_shared<ForestNode>();
    node->root = w;
    node->children = std::move(pairs);
    out.emplace(w, std::move(node));
  }
  return out;
}

}  // namespace

ForestMap leaf_forest(std::string_view token, const CNFGrammar& g) {
  const bool hole = token == kHoleToken;
  SymbolId want = kEpsilonId;
  if (!hole) {
    auto id = g.terminal_id(token);
    if (!id) throw std::invalid_argument("unknown token: " + std::string(token));
    want = *id;
  }

  // One shared leaf per terminal; a terminal is encoded as the pair
  // (terminal leaf, epsilon) so leaves do not need child storage.
  std::unordered_map<SymbolId, ForestNodePtr> leaves;
  std::map<SymbolId, std::vector<ChildPair>> acc;
  for (const TerminalRule& r : g.terminal_rules()) {
    if (!hole && r.term != want) continue;
    auto& leaf = leaves[r.term];
    if (!leaf) leaf = make_leaf(r.term);
    acc[r.lhs].emplace_back(leaf, epsilon_leaf());
  }
  return materialize(std::move(acc));
}

ForestMap oplus(const ForestMap& x, const ForestMap& z) {
  ForestMap out = x;
  for (const auto& [w, znode] : z) {
    auto [it, fresh] = out.emplace(w, znode);
    if (fresh) continue;
    auto merged = std::make_shared<ForestNode>();
    merged->root = w;
    merged->children = it->second->children;
    merged->children.insert(merged->children.end(), znode->children.begin(),
                            znode->children.end());
    it->second = std::move(merged);
  }
  return out;
}

ForestMap otimes(const ForestMap& x, const ForestMap& z, const CNFGrammar& g) {
  std::map<SymbolId, std::vector<ChildPair>> acc;
  for (const BinaryRule& r : g.binary_rules()) {
    auto lx = x.find(r.left);
    if (lx == x.end()) continue;
    auto rz = z.find(r.right);
    if (rz == z.end()) continue;
    acc[r.lhs].emplace_back(lx->second, rz->second);
  }
  return materialize(std::move(acc));
}

ForestChart build_forest_chart(const CNFGrammar& g, const PorousString& s, Schedule sched) {
  ForestChart chart;
  chart.n = s.size();
  chart.cells.assign(chart.n * (chart.n + 1) / 2, ForestMap{});
  for (std::size_t r = 0; r < chart.n; ++r) chart.at(r, r + 1) = leaf_forest(s.token(r), g);

  const auto& rules = g.binary_rules();
  auto fill_cell = [&](std::size_t i, std::size_t j) {
    // Rule-major, split ascending: fixes the child order that indexing and
    // unranking rely on.
    std::map<SymbolId, std::vector<ChildPair>> acc;
    for (const BinaryRule& r : rules) {
      for (std::size_t k = i + 1; k < j; ++k) {
        const ForestMap& left = chart.at(i, k);
        const ForestMap& right = chart.at(k, j);
        auto lx = left.find(r.left);
        if (lx == left.end()) continue;
        auto rz = right.find(r.right);
        if (rz == right.end()) continue;
        acc[r.lhs].emplace_back(lx->second, rz->second);
      }
    }
    chart.at(i, j) = materialize(std::move(acc));
  };

  for (std::size_t span = 2; span <= chart.n; ++span) {
    const std::size_t rows = chart.n - span + 1;
    if (sched == Schedule::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long long i = 0; i < static_cast<long long>(rows); ++i)
        fill_cell(static_cast<std::size_t>(i), static_cast<std::size_t>(i) + span);
    } else {
      for (std::size_t i = 0; i < rows; ++i) fill_cell(i, i + span);
    }
  }
  return chart;
}

ForestMap build_forest(const CNFGrammar& g, const PorousString& s) {
  return build_forest_chart(g, s).at(0, s.size());
}

ForestNodePtr root_forest(const ForestMap& f, const CNFGrammar& g) {
  auto it = f.find(g.start());
  return it == f.end() ? nullptr : it->second;
}

namespace {

bool has_terminal_rule(const CNFGrammar& g, SymbolId lhs, SymbolId term) {
  for (const TerminalRule& r : g.terminal_rules())
    if (r.lhs == lhs && r.term == term) return true;
  return false;
}

bool has_binary_rule(const CNFGrammar& g, SymbolId lhs, SymbolId left, SymbolId right) {
  for (const BinaryRule& r : g.binary_rules())
    if (r.lhs == lhs && r.left == left && r.right == right) return true;
  return false;
}

constexpr long kInProgress = -2;

long check_width(const ForestNodePtr& node, const CNFGrammar& g,
                 std::unordered_map<const ForestNode*, long>& memo) {
  if (!node) return -1;
  auto [it, fresh] = memo.try_emplace(node.get(), kInProgress);
  if (!fresh) return it->second == kInProgress ? -1 : it->second;

  long width = -1;
  if (is_epsilon(*node)) {
    width = node->children.empty() ? 0 : -1;
  } else if (g.is_terminal_id(node->root)) {
    width = node->children.empty() ? 1 : -1;
  } else if (g.is_nonterminal_id(node->root) && !node->children.empty()) {
    width = 0;  // resolved by the first pair, then cross-checked
    for (std::size_t p = 0; p < node->children.size() && width >= 0; ++p) {
      const auto& [l, r] = node->children[p];
      long pw = -1;
      if (r && is_epsilon(*r)) {
        if (l && l->children.empty() && g.is_terminal_id(l->root) &&
            has_terminal_rule(g, node->root, l->root))
          pw = 1;
      } else if (l && r) {
        long lw = check_width(l, g, memo);
        long rw = check_width(r, g, memo);
        if (lw >= 1 && rw >= 1 && has_binary_rule(g, node->root, l->root, r->root))
          pw = lw + rw;
      }
      if (pw < 0 || (p > 0 && pw != width))
        width = -1;
      else
        width = pw;
    }
  }
  memo[node.get()] = width;
  return width;
}

}  // namespace

long forest_width(const ForestNodePtr& root, const CNFGrammar& g) {
  std::unordered_map<const ForestNode*, long> memo;
  return check_width(root, g, memo);
}

}  // namespace cfsample
