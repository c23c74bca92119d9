#include "doctest.h"
#include "test_util.hpp"

using namespace cfsample;
using testutil::kDyck;
using testutil::kDyckCnf;
using testutil::kExpr;
using testutil::ps;

TEST_CASE("completion enumeration filters the full substitution grid") {
  CNFGrammar g = testutil::make_cnf(kDyck);

  auto words = enumerate_completions(g, ps("_ _ _ _"));
  REQUIRE(words.size() == 2);
  // odometer order: "(" enumerates before ")"
  CHECK(testutil::join(words[0]) == "( ( ) )");
  CHECK(testutil::join(words[1]) == "( ) ( )");

  CHECK(enumerate_completions(g, ps("( (")).empty());
  auto fixed = enumerate_completions(g, ps("( )"));
  REQUIRE(fixed.size() == 1);
  CHECK(testutil::join(fixed[0]) == "( )");
  CHECK(enumerate_completions(g, ps(") (")).empty());
}

TEST_CASE("completion enumeration refuses oversized grids") {
  CNFGrammar g = testutil::make_cnf(kDyck);
  std::vector<std::string> toks(21, std::string(kHoleToken));  // 2^21 candidates
  CHECK_THROWS_WITH_AS(enumerate_completions(g, PorousString(toks)),
                       "oracle instance too large", std::runtime_error);
}

TEST_CASE("derivation enumeration lists every tree of a word") {
  CNFGrammar g = testutil::make_cnf(kDyckCnf);

  auto one = enumerate_derivations(g, {"(", ")"});
  REQUIRE(one.sexprs.size() == 1);
  CHECK(one.sexprs[0] == "(S (L () (R )))");
  CHECK(one.yield_counts.at("( )") == 1);

  auto two = enumerate_derivations(g, {"(", ")", "(", ")"});
  REQUIRE(two.sexprs.size() == 1);
  CHECK(two.sexprs[0] == "(S (S (L () (R ))) (S (L () (R ))))");

  CHECK(enumerate_derivations(g, {"(", "("}).sexprs.empty());
  CHECK(enumerate_derivations(g, {"(", "x"}).sexprs.empty());

  CNFGrammar e = testutil::make_cnf(kExpr);
  auto amb = enumerate_derivations(e, {"a", "+", "a", "*", "a"});
  CHECK(amb.sexprs.size() == 2);
  CHECK(amb.yield_counts.at("a + a * a") == 2);

  CHECK_THROWS_AS(enumerate_derivations(g, std::vector<std::string>(9, "(")),
                  std::runtime_error);
}

TEST_CASE("tree sets accumulate derivations across completions") {
  CNFGrammar g = testutil::make_cnf(kDyck);
  auto set = oracle_tree_set(g, ps("_ _ _ _"));
  CHECK(set.sexprs.size() == 2);
  CHECK(std::is_sorted(set.sexprs.begin(), set.sexprs.end()));
  CHECK(set.yield_counts ==
        std::map<std::string, std::size_t>{{"( ( ) )", 1}, {"( ) ( )", 1}});
}

TEST_CASE("brute-force derivation over the original rules") {
  Grammar dyck = parse_grammar(kDyck);
  CHECK(derives(dyck, {"(", ")"}));
  CHECK(derives(dyck, {"(", "(", ")", ")"}));
  CHECK_FALSE(derives(dyck, {"(", "("}));
  CHECK_FALSE(derives(dyck, {}));

  Grammar eps = parse_grammar("S -> a S |\n");
  CHECK(derives(eps, {}));
  CHECK(derives(eps, {"a", "a", "a"}));
  CHECK_FALSE(derives(eps, {"a", "b"}));
}

TEST_CASE("cyclic unit rules neither loop nor poison the cache") {
  // B's failure on "y" is first computed underneath an in-progress A; a naive
  // negative cache would wrongly reuse it.
  Grammar g = parse_grammar("A -> B | x\nB -> A | y\n");
  CHECK(derives(g, {"x"}));
  CHECK(derives(g, {"y"}));
  CHECK_FALSE(derives(g, {"z"}));
  CHECK_FALSE(derives(g, {"x", "y"}));

  Grammar self = parse_grammar("S -> S\n");
  CHECK_FALSE(derives(self, {"x"}));
}

TEST_CASE("oracle totals equal packed-forest counts on a spot grid") {
  CNFGrammar g = testutil::make_cnf(kExpr);
  for (const PorousString& s : testutil::sweep_instances(g, 4, 1, 3)) {
    std::size_t oracle_total = 0;
    for (const auto& word : enumerate_completions(g, s))
      oracle_total += enumerate_derivations(g, word).sexprs.size();
    INFO(s.to_string());
    CHECK(TreeCount(oracle_total) == count_trees(root_forest(build_forest(g, s), g)));
  }
}
