#include "cfsample/recognizer.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace cfsample {

PorousString::PorousString(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw std::invalid_argument("porous string must be nonempty");
  for (const auto& t : tokens_)
    if (t.empty()) throw std::invalid_argument("empty token in porous string");
}

PorousString PorousString::parse(std::string_view text) {
  std::istringstream iss{std::string(text)};
  std::vector<std::string> tokens;
  for (std::string tok; iss >> tok;) tokens.push_back(std::move(tok));
  return PorousString(std::move(tokens));
}

std::string PorousString::to_string() const {
  std::string out;
  for (const auto& t : tokens_) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

NontermSet& NontermSet::operator|=(const NontermSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

bool NontermSet::any() const {
  for (auto w : words_)
    if (w) return true;
  return false;
}

std::size_t NontermSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<SymbolId> NontermSet::ids() const {
  std::vector<SymbolId> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w) {
      out.push_back(static_cast<SymbolId>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

NontermSet set_product(const NontermSet& x, const NontermSet& z, const CNFGrammar& g) {
  NontermSet out(g.nonterminal_count());
  for (const auto& r : g.binary_rules())
    if (x.test(r.left) && z.test(r.right)) out.set(r.lhs);
  return out;
}

NontermSet leaf_producers(const CNFGrammar& g, std::string_view token) {
  NontermSet out(g.nonterminal_count());
  if (token == kHoleToken) {
    for (const auto& r : g.terminal_rules()) out.set(r.lhs);
    return out;
  }
  auto id = g.terminal_id(token);
  if (!id) throw std::invalid_argument("unknown token: " + std::string(token));
  for (SymbolId w : g.terminal_producers(*id)) out.set(w);
  return out;
}

namespace {

SetChart make_chart(const CNFGrammar& g, const PorousString& s) {
  SetChart chart;
  chart.n = s.size();
  chart.cells.assign(chart.n * (chart.n + 1) / 2, NontermSet(g.nonterminal_count()));
  for (std::size_t r = 0; r < chart.n; ++r) chart.at(r, r + 1) = leaf_producers(g, s.token(r));
  return chart;
}

}  // namespace

SetChart build_set_chart(const CNFGrammar& g, const PorousString& s, Schedule sched) {
  SetChart chart = make_chart(g, s);
  const auto& rules = g.binary_rules();
  const std::size_t n = chart.n;

  auto fill_cell = [&](std::size_t i, std::size_t span) {
    const std::size_t j = i + span;
    NontermSet cell(g.nonterminal_count());
    for (std::size_t k = i + 1; k < j; ++k) {
      const NontermSet& left = chart.at(i, k);
      const NontermSet& right = chart.at(k, j);
      for (const auto& r : rules)
        if (left.test(r.left) && right.test(r.right)) cell.set(r.lhs);
    }
    chart.at(i, j) = std::move(cell);
  };

  for (std::size_t span = 2; span <= n; ++span) {
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n - span);
    if (sched == Schedule::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i <= last; ++i) fill_cell(static_cast<std::size_t>(i), span);
    } else {
      for (std::ptrdiff_t i = 0; i <= last; ++i) fill_cell(static_cast<std::size_t>(i), span);
    }
  }
  return chart;
}

SetChart build_set_chart_power_iteration(const CNFGrammar& g, const PorousString& s,
                                         int* iterations) {
  SetChart m = make_chart(g, s);
  const std::size_t n = m.n;
  int iters = 0;
  for (;;) {
    // M' = M + M^2, computed cellwise over the strict upper triangle.
    SetChart next = m;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        NontermSet sq(g.nonterminal_count());
        for (std::size_t k = i + 1; k < j; ++k)
          sq |= set_product(m.at(i, k), m.at(k, j), g);
        next.at(i, j) |= sq;
      }
    }
    ++iters;
    if (next == m) break;
    m = std::move(next);
  }
  if (iterations) *iterations = iters;
  return m;
}

bool recognize(const CNFGrammar& g, const PorousString& s) {
  SetChart chart = build_set_chart(g, s);
  return chart.at(0, s.size()).test(g.start());
}

}  // namespace cfsample
