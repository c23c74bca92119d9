#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cfsample/grammar.hpp"
#include "cfsample/recognizer.hpp"

namespace cfsample {

/// Brute-force reference implementations for tests. Nothing here touches the
/// chart or forest code paths; only the grammar types are shared, so these
/// stay an independent witness. Desk-scale instances only, enforced by guards.

struct DerivationSet {
  std::vector<std::string> sexprs;                 // distinct, sorted
  std::map<std::string, std::size_t> yield_counts; // space-joined yield -> #trees
};

/// Every hole assignment (at most |alphabet|^holes <= 10^6, else
/// "oracle instance too large") whose word the grammar derives, in
/// odometer order over the terminal list. Membership is decided by a naive
/// memoized top-down walk over the CNF rules.
std::vector<std::vector<std::string>> enumerate_completions(const CNFGrammar& g,
                                                            const PorousString& s);

/// All derivation trees of one concrete word (length <= 8, same guard error),
/// serialized exactly like the main pipeline's to_sexpr.
DerivationSet enumerate_derivations(const CNFGrammar& g, const std::vector<std::string>& word);

/// Union of enumerate_derivations over enumerate_completions(g, s).
DerivationSet oracle_tree_set(const CNFGrammar& g, const PorousString& s);

/// Membership under the original (pre-CNF) grammar, by exhaustive rule
/// application with cycle cutting. Used to check language preservation.
bool derives(const Grammar& g, const std::vector<std::string>& tokens);

}  // namespace cfsample
