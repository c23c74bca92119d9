#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cfsample/enumerate.hpp"
#include "cfsample/forest.hpp"
#include "cfsample/grammar.hpp"

namespace cfsample {

enum class SampleMode { with_replacement, without_replacement };
enum class Weighting { count_proportional, rule_uniform, explicit_weights };

/// Weights for explicit_weights are keyed by the rule's canonical text
/// (CNFGrammar::rule_to_string); they must be nonnegative and cover every
/// rule that licenses a reachable child pair.
struct SamplerConfig {
  SampleMode mode = SampleMode::with_replacement;
  Weighting weighting = Weighting::count_proportional;
  std::uint64_t seed = 0;
  std::optional<TreeCount> sample_count;  // nullopt = all trees (wor only)
  std::map<std::string, double> rule_weights;
};

/// Deterministic source for every draw the samplers make. Bounded draws are
/// hand-rolled (mask + reject) so sequences are identical across platforms.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, 2^n).
  TreeCount bits(unsigned n);

  /// Uniform integer in [0, bound); bound >= 1. bound == 1 consumes nothing.
  TreeCount below(const TreeCount& bound);

 private:
  std::mt19937_64 eng_;
};

/// Normalized Multinoulli weights over t's child pairs under cfg.weighting.
/// Explicit mode drops absent rules and renormalizes over the pairs present;
/// a reachable pair whose rule has no supplied weight is an error
/// ("incomplete probability vector").
std::vector<double> pair_weights(const ForestNode& t, const CNFGrammar& g,
                                 const CountTable& counts, const SamplerConfig& cfg);

/// With-replacement draw: Multinoulli over child pairs at every level, then
/// recurse left and right. Count-proportional weighting selects by exact
/// integer prefix sums, so it is uniform over trees at any magnitude.
DerivationTreePtr gamma_sample(const ForestNodePtr& t, const CNFGrammar& g,
                               const CountTable& counts, const SamplerConfig& cfg,
                               SampleRng& rng);

/// Visits every integer in [0, n) exactly once, in seed-determined order.
/// Realized as a full-period LCG modulo the least power of two >= n
/// (multiplier = 1 mod 4, increment odd), skipping outputs >= n. For
/// n >= 2^128 the walk would be impractical to exhaust, so the stream
/// degrades to fresh uniform draws with a dedup set; kind() reports which.
class FullCycleIndexStream {
 public:
  enum class Kind { full_cycle, rejection_dedup };

  FullCycleIndexStream(TreeCount n, std::uint64_t seed);

  /// Next unseen index, or nullopt once all n were emitted.
  std::optional<TreeCount> next();

  Kind kind() const { return kind_; }
  const TreeCount& target() const { return n_; }
  const TreeCount& modulus() const { return m_; }
  const TreeCount& multiplier() const { return a_; }
  const TreeCount& increment() const { return c_; }

 private:
  TreeCount n_, m_, a_, c_, state_, mask_;
  TreeCount emitted_ = 0;
  Kind kind_ = Kind::full_cycle;
  SampleRng rng_;              // rejection_dedup only
  std::set<TreeCount> seen_;   // rejection_dedup only
};

FullCycleIndexStream full_cycle_stream(const TreeCount& n, std::uint64_t seed);

/// Lazy without-replacement sequence: phi applied to the first k entries of
/// a full-cycle permutation of all tree indices.
class TreeSampleStream {
 public:
  /// k > count(root) throws std::invalid_argument naming the exact count.
  TreeSampleStream(ForestNodePtr root, const CountTable& counts,
                   const std::optional<TreeCount>& k, std::uint64_t seed);

  std::optional<DerivationTreePtr> next();
  std::optional<TreeCount> next_index();

  const TreeCount& requested() const { return k_; }
  const FullCycleIndexStream& indices() const { return stream_; }

 private:
  ForestNodePtr root_;
  const CountTable* counts_;
  TreeCount k_;
  TreeCount taken_ = 0;
  FullCycleIndexStream stream_;
};

/// Eager form of TreeSampleStream.
std::vector<DerivationTreePtr> sample_without_replacement(const ForestNodePtr& root,
                                                          const CountTable& counts,
                                                          const std::optional<TreeCount>& k,
                                                          std::uint64_t seed);

/// Decodes indices[p] into results[p] in parallel; jobs <= 0 uses the
/// runtime default. Indices are independent, so no state is shared.
std::vector<DerivationTreePtr> decode_batch(const ForestNodePtr& root,
                                            const CountTable& counts,
                                            const std::vector<TreeCount>& indices,
                                            int jobs = 0);

}  // namespace cfsample
