#include "cfsample/sampler.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfsample {

namespace mp = boost::multiprecision;

TreeCount SampleRng::bits(unsigned n) {
  if (n == 0) return 0;
  TreeCount out = 0;
  for (unsigned got = 0; got < n; got += 64) out = (out << 64) | next_u64();
  return out & ((TreeCount(1) << n) - 1);
}

TreeCount SampleRng::below(const TreeCount& bound) {
  if (bound < 1) throw std::invalid_argument("empty draw range");
  if (bound == 1) return 0;
  const unsigned nbits = mp::msb(bound - 1) + 1;
  for (;;) {
    TreeCount v = bits(nbits);
    if (v < bound) return v;
  }
}

namespace {

// num/den as a double; both shifted into double range first when den is huge.
double ratio_to_double(const TreeCount& num, const TreeCount& den) {
  if (num == 0) return 0.0;
  long shift = den > 1 ? static_cast<long>(mp::msb(den)) - 900 : 0;
  if (shift > 0) {
    TreeCount n2 = num >> shift, d2 = den >> shift;
    return n2.convert_to<double>() / d2.convert_to<double>();
  }
  return num.convert_to<double>() / den.convert_to<double>();
}

std::string licensing_rule(const ForestNode& t, const ChildPair& pair, const CNFGrammar& g) {
  const auto& [l, r] = pair;
  if (is_epsilon(*r)) return g.rule_to_string(TerminalRule{t.root, l->root});
  return g.rule_to_string(BinaryRule{t.root, l->root, r->root});
}

}  // namespace

std::vector<double> pair_weights(const ForestNode& t, const CNFGrammar& g,
                                 const CountTable& counts, const SamplerConfig& cfg) {
  const std::size_t k = t.children.size();
  std::vector<double> w(k);
  switch (cfg.weighting) {
    case Weighting::count_proportional: {
      const TreeCount& total = counts.count(&t);
      for (std::size_t p = 0; p < k; ++p) {
        const auto& [l, r] = t.children[p];
        w[p] = ratio_to_double(counts.count(l.get()) * counts.count(r.get()), total);
      }
      return w;
    }
    case Weighting::rule_uniform: {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
      return w;
    }
    case Weighting::explicit_weights: {
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const std::string rule = licensing_rule(t, t.children[p], g);
        auto it = cfg.rule_weights.find(rule);
        if (it == cfg.rule_weights.end())
          throw std::invalid_argument("incomplete probability vector: no weight for rule: " + rule);
        if (it->second < 0.0)
          throw std::invalid_argument("negative weight for rule: " + rule);
        w[p] = it->second;
        sum += it->second;
      }
      if (sum <= 0.0)
        throw std::invalid_argument("probability vector not normalizable: weights sum to zero");
      for (double& x : w) x /= sum;
      return w;
    }
  }
  throw std::logic_error("unreachable weighting");
}

DerivationTreePtr gamma_sample(const ForestNodePtr& t, const CNFGrammar& g,
                               const CountTable& counts, const SamplerConfig& cfg,
                               SampleRng& rng) {
  if (t->children.empty()) return make_tree(t->root);

  std::size_t p = 0;
  if (t->children.size() > 1) {
    switch (cfg.weighting) {
      case Weighting::count_proportional: {
        // Exact: pick a tree index block, never a rounded probability.
        const auto& F = counts.prefix_sums(t.get());
        TreeCount u = rng.below(F.back());
        p = static_cast<std::size_t>(std::upper_bound(F.begin(), F.end(), u) - F.begin());
        break;
      }
      case Weighting::rule_uniform: {
        p = rng.below(TreeCount(t->children.size())).convert_to<std::size_t>();
        break;
      }
      case Weighting::explicit_weights: {
        const std::vector<double> w = pair_weights(*t, g, counts, cfg);
        const double u = rng.unit();
        double acc = 0.0;
        p = w.size() - 1;  // guard against fp rounding at the top end
        for (std::size_t q = 0; q < w.size(); ++q) {
          acc += w[q];
          if (u < acc) {
            p = q;
            break;
          }
        }
        break;
      }
    }
  }

  const auto& [l, r] = t->children[p];
  if (is_epsilon(*r)) return make_tree(t->root, {make_tree(l->root)});
  DerivationTreePtr lt = gamma_sample(l, g, counts, cfg, rng);
  DerivationTreePtr rt = gamma_sample(r, g, counts, cfg, rng);
  return make_tree(t->root, {std::move(lt), std::move(rt)});
}

FullCycleIndexStream::FullCycleIndexStream(TreeCount n, std::uint64_t seed)
    : n_(std::move(n)), rng_(seed) {
  if (n_ < 1) throw std::invalid_argument("index stream needs a positive range");
  if (mp::msb(n_) >= 128) {
    kind_ = Kind::rejection_dedup;
    m_ = a_ = c_ = state_ = mask_ = 0;
    return;
  }
  const unsigned width = n_ == 1 ? 0 : static_cast<unsigned>(mp::msb(n_ - 1)) + 1;
  m_ = TreeCount(1) << width;
  mask_ = m_ - 1;
  if (width == 0) {
    a_ = 1;
    c_ = 1;
    state_ = 0;
    return;
  }
  a_ = ((rng_.bits(width) >> 2) << 2) | 1;  // a = 1 (mod 4)
  c_ = rng_.bits(width) | 1;                // odd
  state_ = rng_.bits(width);
}

std::optional<TreeCount> FullCycleIndexStream::next() {
  if (emitted_ == n_) return std::nullopt;
  ++emitted_;
  if (kind_ == Kind::rejection_dedup) {
    for (;;) {
      TreeCount v = rng_.below(n_);
      if (seen_.insert(v).second) return v;
    }
  }
  for (;;) {
    TreeCount cur = state_;
    state_ = (a_ * state_ + c_) & mask_;
    if (cur < n_) return cur;  // cycle-walk past the power-of-two padding
  }
}

FullCycleIndexStream full_cycle_stream(const TreeCount& n, std::uint64_t seed) {
  return FullCycleIndexStream(n, seed);
}

TreeSampleStream::TreeSampleStream(ForestNodePtr root, const CountTable& counts,
                                   const std::optional<TreeCount>& k, std::uint64_t seed)
    : root_(std::move(root)),
      counts_(&counts),
      k_(0),
      stream_(1, seed) {
  const TreeCount total = root_ ? counts.count(root_.get()) : 0;
  k_ = k.value_or(total);
  if (k_ < 0) throw std::invalid_argument("sample count must be nonnegative");
  if (k_ > total)
    throw std::invalid_argument("requested " + k_.str() + " distinct samples but only " +
                                total.str() + " trees exist");
  if (total > 1) stream_ = FullCycleIndexStream(total, seed);
}

std::optional<TreeCount> TreeSampleStream::next_index() {
  if (taken_ == k_) return std::nullopt;
  ++taken_;
  return stream_.next();
}

std::optional<DerivationTreePtr> TreeSampleStream::next() {
  auto idx = next_index();
  if (!idx) return std::nullopt;
  return phi(root_, *idx, *counts_);
}

std::vector<DerivationTreePtr> sample_without_replacement(const ForestNodePtr& root,
                                                          const CountTable& counts,
                                                          const std::optional<TreeCount>& k,
                                                          std::uint64_t seed) {
  TreeSampleStream stream(root, counts, k, seed);
  std::vector<DerivationTreePtr> out;
  while (auto t = stream.next()) out.push_back(std::move(*t));
  return out;
}

std::vector<DerivationTreePtr> decode_batch(const ForestNodePtr& root, const CountTable& counts,
                                            const std::vector<TreeCount>& indices, int jobs) {
  const TreeCount total = root ? counts.count(root.get()) : 0;
  for (const TreeCount& i : indices)
    if (i < 0 || i >= total) throw std::out_of_range("index out of bounds");

  std::vector<DerivationTreePtr> out(indices.size());
  const auto n = static_cast<long long>(indices.size());
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = phi(root, indices[static_cast<std::size_t>(i)], counts);
#else
  (void)jobs;
  for (long long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = phi(root, indices[static_cast<std::size_t>(i)], counts);
#endif
  return out;
}

}  // namespace cfsample
