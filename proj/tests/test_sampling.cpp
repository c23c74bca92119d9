#include <map>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

#include "cfsample/sampler.hpp"

using namespace cfsample;
using testutil::kDyck;
using testutil::kExpr;
using testutil::ps;

namespace {

struct Built {
  CNFGrammar g;
  ForestNodePtr root;
  CountTable counts;

  Built(const char* text, const std::string& porous)
      : g(testutil::make_cnf(text)),
        root(root_forest(build_forest(g, ps(porous)), g)),
        counts(root) {}
};

}  // namespace

TEST_CASE("bounded draws are unbiased helpers with stable sequences") {
  SampleRng a(11), b(11);
  CHECK(a.next_u64() == b.next_u64());

  // below(1) must not consume state
  SampleRng c(5), d(5);
  CHECK(c.below(1) == 0);
  CHECK(c.next_u64() == d.next_u64());

  SampleRng e(9);
  for (int i = 0; i < 200; ++i) {
    TreeCount v = e.below(TreeCount(6));
    CHECK(v >= 0);
    CHECK(v < 6);
  }
  CHECK(e.bits(130) < (TreeCount(1) << 130));
  CHECK_THROWS_AS(e.below(TreeCount(0)), std::invalid_argument);
}

TEST_CASE("pair weights under the three weightings") {
  SamplerConfig cfg;

  // counts 2, 3, 1 -> 1/3, 1/2, 1/6
  auto fan = [](SymbolId root, int k) {
    auto n = std::make_shared<ForestNode>();
    n->root = root;
    for (int i = 0; i < k; ++i) n->children.emplace_back(make_leaf(8), epsilon_leaf());
    return n;
  };
  auto node = std::make_shared<ForestNode>();
  node->root = 0;
  node->children.emplace_back(fan(1, 2), make_leaf(8));
  node->children.emplace_back(fan(1, 3), make_leaf(8));
  node->children.emplace_back(make_leaf(8), make_leaf(8));
  CountTable counts(node);
  CNFGrammar g = testutil::make_cnf(kDyck);  // unused by count weighting

  cfg.weighting = Weighting::count_proportional;
  auto w = pair_weights(*node, g, counts, cfg);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0 / 2).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(1.0 / 6).epsilon(1e-12));

  cfg.weighting = Weighting::rule_uniform;
  Built dyck(kDyck, "_ _ _ _");
  auto u = pair_weights(*dyck.root, dyck.g, dyck.counts, cfg);
  CHECK(u == std::vector<double>{0.5, 0.5});
}

TEST_CASE("explicit weights renormalize over the pairs actually present") {
  Built dyck(kDyck, "_ _ _ _");  // root pairs: S -> S S and S -> B_1_0 T_1
  SamplerConfig cfg;
  cfg.weighting = Weighting::explicit_weights;
  cfg.rule_weights = {{"S -> S S", 1.0 / 3}, {"S -> B_1_0 T_1", 1.0 / 3},
                      {"S -> T_0 T_1", 1.0 / 3}};
  auto w = pair_weights(*dyck.root, dyck.g, dyck.counts, cfg);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));

  cfg.rule_weights = {{"S -> S S", 1.0}};
  CHECK_THROWS_WITH_AS(pair_weights(*dyck.root, dyck.g, dyck.counts, cfg),
                       doctest::Contains("incomplete probability vector"), std::invalid_argument);

  cfg.rule_weights = {{"S -> S S", -1.0}, {"S -> B_1_0 T_1", 1.0}};
  CHECK_THROWS_AS(pair_weights(*dyck.root, dyck.g, dyck.counts, cfg), std::invalid_argument);

  cfg.rule_weights = {{"S -> S S", 0.0}, {"S -> B_1_0 T_1", 0.0}};
  CHECK_THROWS_AS(pair_weights(*dyck.root, dyck.g, dyck.counts, cfg), std::invalid_argument);
}

TEST_CASE("the recursive sampler returns the unique tree when there is no choice") {
  Built one(kDyck, "( _ ) _");
  SamplerConfig cfg;
  SampleRng rng(3);
  for (int i = 0; i < 20; ++i) {
    auto t = gamma_sample(one.root, one.g, one.counts, cfg, rng);
    CHECK(testutil::join(yield_of(*t, one.g)) == "( ( ) )");
  }
}

TEST_CASE("sampled trees are licensed, full-width, and template-compatible") {
  std::mt19937_64 pick(303);
  for (const char* text : {kDyck, kExpr}) {
    CNFGrammar g = testutil::make_cnf(text);
    auto pool = testutil::sweep_instances(g, 6, 1, 31);
    int done = 0;
    for (int trial = 0; done < 60 && trial < 4000; ++trial) {
      const PorousString& s = pool[pick() % pool.size()];
      ForestNodePtr root = root_forest(build_forest(g, s), g);
      if (!root) continue;
      CountTable counts(root);
      SamplerConfig cfg;
      cfg.weighting = trial % 2 ? Weighting::count_proportional : Weighting::rule_uniform;
      SampleRng rng(1000 + trial);
      auto t = gamma_sample(root, g, counts, cfg, rng);
      INFO(s.to_string());
      CHECK(testutil::valid_derivation(*t, g));
      CHECK(yield_of(*t, g).size() == s.size());
      CHECK(testutil::completes(yield_of(*t, g), s));
      ++done;
    }
    CHECK(done == 60);
  }
}

TEST_CASE("same seed, same draw sequence") {
  Built dyck(kDyck, "_ _ _ _ _ _ _ _");
  SamplerConfig cfg;
  for (auto weighting : {Weighting::count_proportional, Weighting::rule_uniform}) {
    cfg.weighting = weighting;
    SampleRng r1(77), r2(77);
    for (int i = 0; i < 25; ++i)
      CHECK(to_sexpr(*gamma_sample(dyck.root, dyck.g, dyck.counts, cfg, r1), dyck.g) ==
            to_sexpr(*gamma_sample(dyck.root, dyck.g, dyck.counts, cfg, r2), dyck.g));
  }
}

TEST_CASE("count-proportional draws stay near uniform") {
  Built dyck(kDyck, "_ _ _ _ _ _");
  const TreeCount total = dyck.counts.count(dyck.root.get());
  REQUIRE(total == 6);
  SamplerConfig cfg;
  SampleRng rng(2024);
  std::map<std::string, int> freq;
  const int n = 3000;
  for (int i = 0; i < n; ++i)
    ++freq[to_sexpr(*gamma_sample(dyck.root, dyck.g, dyck.counts, cfg, rng), dyck.g)];
  REQUIRE(freq.size() == 6);
  for (const auto& [tree, count] : freq) {
    INFO(tree);
    CHECK(count > n / 6 * 0.7);
    CHECK(count < n / 6 * 1.3);
  }
}

TEST_CASE("index streams visit each residue exactly once") {
  auto one = full_cycle_stream(TreeCount(1), 5);
  CHECK(one.next() == TreeCount(0));
  CHECK_FALSE(one.next().has_value());

  for (std::uint64_t seed : {0ull, 1ull, 42ull, 890ull}) {
    auto s = full_cycle_stream(TreeCount(6), seed);
    CHECK(s.kind() == FullCycleIndexStream::Kind::full_cycle);
    CHECK(s.modulus() == 8);
    CHECK(s.multiplier() % 4 == 1);
    CHECK(s.increment() % 2 == 1);
    std::set<TreeCount> seen;
    while (auto v = s.next()) {
      CHECK(*v < 6);
      CHECK(seen.insert(*v).second);
    }
    CHECK(seen.size() == 6);
  }

  auto a = full_cycle_stream(TreeCount(97), 31);
  auto b = full_cycle_stream(TreeCount(97), 31);
  for (int i = 0; i < 97; ++i) CHECK(a.next() == b.next());

  CHECK_THROWS_AS(full_cycle_stream(TreeCount(0), 1), std::invalid_argument);
}

TEST_CASE("astronomical ranges fall back to dedup draws and say so") {
  const TreeCount huge = TreeCount(1) << 200;
  auto s = full_cycle_stream(huge, 12);
  CHECK(s.kind() == FullCycleIndexStream::Kind::rejection_dedup);
  std::set<TreeCount> seen;
  for (int i = 0; i < 50; ++i) {
    auto v = s.next();
    REQUIRE(v.has_value());
    CHECK(*v < huge);
    CHECK(seen.insert(*v).second);
  }

  // just below the cutoff stays a true permutation
  auto below = full_cycle_stream((TreeCount(1) << 128) - 1, 12);
  CHECK(below.kind() == FullCycleIndexStream::Kind::full_cycle);
}

TEST_CASE("without-replacement streams: whole population, no duplicates") {
  Built dyck(kDyck, "_ _ _ _");
  auto trees = sample_without_replacement(dyck.root, dyck.counts, TreeCount(2), 99);
  REQUIRE(trees.size() == 2);
  CHECK(to_sexpr(*trees[0], dyck.g) != to_sexpr(*trees[1], dyck.g));

  // k = ALL equals the oracle's full tree set
  Built six(kDyck, "_ _ _ _ _ _");
  auto all = sample_without_replacement(six.root, six.counts, std::nullopt, 7);
  std::vector<std::string> got;
  for (const auto& t : all) got.push_back(to_sexpr(*t, six.g));
  std::sort(got.begin(), got.end());
  CHECK(got == oracle_tree_set(six.g, ps("_ _ _ _ _ _")).sexprs);

  CHECK(sample_without_replacement(dyck.root, dyck.counts, TreeCount(0), 4).empty());
}

TEST_CASE("asking for more distinct trees than exist names the count") {
  Built dyck(kDyck, "_ _ _ _");
  CHECK_THROWS_WITH_AS(TreeSampleStream(dyck.root, dyck.counts, TreeCount(3), 1),
                       doctest::Contains("only 2 trees exist"), std::invalid_argument);
  CHECK_THROWS_AS(TreeSampleStream(dyck.root, dyck.counts, TreeCount(-1), 1),
                  std::invalid_argument);

  // empty forest: only k = 0 is satisfiable
  CNFGrammar g = testutil::make_cnf(kDyck);
  CountTable none(nullptr);
  CHECK_THROWS_WITH_AS(TreeSampleStream(nullptr, none, TreeCount(1), 1),
                       doctest::Contains("only 0 trees exist"), std::invalid_argument);
  TreeSampleStream empty(nullptr, none, TreeCount(0), 1);
  CHECK_FALSE(empty.next().has_value());
}

TEST_CASE("lazy and eager without-replacement sampling agree") {
  Built six(kDyck, "_ _ _ _ _ _");
  TreeSampleStream stream(six.root, six.counts, TreeCount(4), 321);
  auto eager = sample_without_replacement(six.root, six.counts, TreeCount(4), 321);
  for (const auto& t : eager) {
    auto u = stream.next();
    REQUIRE(u.has_value());
    CHECK(to_sexpr(**u, six.g) == to_sexpr(*t, six.g));
  }
  CHECK_FALSE(stream.next().has_value());
}

TEST_CASE("batch decoding matches one-by-one unranking for any thread count") {
  Built expr(kExpr, "_ _ _ _ _ _ _");
  const TreeCount total = expr.counts.count(expr.root.get());
  std::vector<TreeCount> indices;
  for (TreeCount i = 0; i < total; ++i) indices.push_back(i);

  auto serial = decode_batch(expr.root, expr.counts, indices, 1);
  auto wide = decode_batch(expr.root, expr.counts, indices, 4);
  REQUIRE(serial.size() == wide.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(to_sexpr(*serial[i], expr.g) == to_sexpr(*wide[i], expr.g));
    CHECK(to_sexpr(*serial[i], expr.g) == to_sexpr(*phi(expr.root, indices[i], expr.counts), expr.g));
  }

  CHECK_THROWS_AS(decode_batch(expr.root, expr.counts, {total}, 2), std::out_of_range);
}
