#include "cfsample/oracle.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <set>
#include <stdexcept>
#include <tuple>

namespace cfsample {

namespace {

using boost::multiprecision::cpp_int;

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<SymbolId> token_ids(const CNFGrammar& g, const std::vector<std::string>& word) {
  std::vector<SymbolId> ids;
  ids.reserve(word.size());
  for (const auto& t : word) ids.push_back(g.terminal_id(t).value_or(kEpsilonId));
  return ids;
}

/// Top-down memoized derivability over CNF rules. Spans shrink strictly, so
/// plain memoization is enough (no cycles to cut).
class NaiveMember {
 public:
  NaiveMember(const CNFGrammar& g, const std::vector<SymbolId>& ids)
      : g_(g), ids_(ids), n_(ids.size()),
        memo_(g.nonterminal_count() * n_ * (n_ + 1), 0) {}

  bool derivable(SymbolId a, std::size_t i, std::size_t j) {
    char& slot = memo_[(static_cast<std::size_t>(a) * n_ + i) * (n_ + 1) + j];
    if (slot) return slot == 2;
    bool yes = false;
    if (j - i == 1) {
      for (const TerminalRule& r : g_.terminal_rules())
        if (r.lhs == a && r.term == ids_[i]) {
          yes = true;
          break;
        }
    } else {
      for (const BinaryRule& r : g_.binary_rules()) {
        if (r.lhs != a) continue;
        for (std::size_t k = i + 1; k < j && !yes; ++k)
          yes = derivable(r.left, i, k) && derivable(r.right, k, j);
        if (yes) break;
      }
    }
    slot = yes ? 2 : 1;
    return yes;
  }

 private:
  const CNFGrammar& g_;
  const std::vector<SymbolId>& ids_;
  std::size_t n_;
  std::vector<char> memo_;
};

bool naive_member(const CNFGrammar& g, const std::vector<std::string>& word) {
  if (word.empty()) return false;
  auto ids = token_ids(g, word);
  for (SymbolId id : ids)
    if (id == kEpsilonId) return false;
  return NaiveMember(g, ids).derivable(g.start(), 0, word.size());
}

}  // namespace

std::vector<std::vector<std::string>> enumerate_completions(const CNFGrammar& g,
                                                            const PorousString& s) {
  std::vector<std::size_t> holes;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.is_hole(i)) holes.push_back(i);

  const std::size_t sigma = g.terminal_count();
  cpp_int candidates = boost::multiprecision::pow(cpp_int(sigma), static_cast<unsigned>(holes.size()));
  if (candidates > 1000000) throw std::runtime_error("oracle instance too large");

  std::vector<std::vector<std::string>> found;
  std::vector<std::size_t> digit(holes.size(), 0);
  std::vector<std::string> word = s.tokens();
  for (;;) {
    for (std::size_t h = 0; h < holes.size(); ++h)
      word[holes[h]] = g.name(static_cast<SymbolId>(g.nonterminal_count() + digit[h]));
    if (naive_member(g, word)) found.push_back(word);

    // odometer, rightmost digit fastest
    std::size_t h = holes.size();
    while (h > 0 && ++digit[h - 1] == sigma) digit[--h] = 0;
    if (h == 0) break;
  }
  return found;
}

DerivationSet enumerate_derivations(const CNFGrammar& g, const std::vector<std::string>& word) {
  if (word.size() > 8) throw std::runtime_error("oracle instance too large");
  DerivationSet out;
  if (word.empty()) return out;
  auto ids = token_ids(g, word);
  for (SymbolId id : ids)
    if (id == kEpsilonId) return out;

  const std::size_t n = word.size();
  std::map<std::tuple<SymbolId, std::size_t, std::size_t>, std::vector<std::string>> memo;

  auto trees = [&](auto&& self, SymbolId a, std::size_t i, std::size_t j)
      -> const std::vector<std::string>& {
    auto key = std::make_tuple(a, i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<std::string> acc;
    if (j - i == 1) {
      for (const TerminalRule& r : g.terminal_rules())
        if (r.lhs == a && r.term == ids[i])
          acc.push_back("(" + g.name(a) + " " + g.name(r.term) + ")");
    } else {
      for (const BinaryRule& r : g.binary_rules()) {
        if (r.lhs != a) continue;
        for (std::size_t k = i + 1; k < j; ++k)
          for (const std::string& lt : self(self, r.left, i, k))
            for (const std::string& rt : self(self, r.right, k, j))
              acc.push_back("(" + g.name(a) + " " + lt + " " + rt + ")");
      }
    }
    return memo.emplace(key, std::move(acc)).first->second;
  };

  out.sexprs = trees(trees, g.start(), 0, n);
  std::sort(out.sexprs.begin(), out.sexprs.end());
  if (!out.sexprs.empty()) out.yield_counts[join(word)] = out.sexprs.size();
  return out;
}

DerivationSet oracle_tree_set(const CNFGrammar& g, const PorousString& s) {
  DerivationSet out;
  for (const auto& word : enumerate_completions(g, s)) {
    DerivationSet one = enumerate_derivations(g, word);
    out.sexprs.insert(out.sexprs.end(), one.sexprs.begin(), one.sexprs.end());
    for (auto& [y, c] : one.yield_counts) out.yield_counts[y] += c;
  }
  std::sort(out.sexprs.begin(), out.sexprs.end());
  return out;
}

namespace {

/// Derivability under arbitrary productions. Repeats of (symbol, span) on the
/// current path are cut; a cut can only prune non-minimal derivations, so the
/// verdict stays correct. Negative results computed under a cut are not
/// memoized (they depend on what was on the path), positives always are.
class OrigDeriver {
 public:
  OrigDeriver(const Grammar& g, const std::vector<std::string>& tokens)
      : toks_(tokens) {
    for (const Production& p : g.productions) prods_[p.lhs].push_back(&p);
  }

  bool derive(const std::string& a, std::size_t i, std::size_t j, bool& tainted) {
    auto key = std::make_tuple(a, i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (inprog_.count(key)) {
      tainted = true;
      return false;
    }
    inprog_.insert(key);
    bool found = false, local_taint = false;
    auto pit = prods_.find(a);
    if (pit != prods_.end()) {
      for (const Production* p : pit->second)
        if (match_seq(p->rhs, 0, i, j, local_taint)) {
          found = true;
          break;
        }
    }
    inprog_.erase(key);
    if (found) {
      memo_[key] = true;
    } else if (!local_taint) {
      memo_[key] = false;
    } else {
      tainted = true;
    }
    return found;
  }

 private:
  bool match_seq(const std::vector<Symbol>& rhs, std::size_t idx, std::size_t i,
                 std::size_t j, bool& tainted) {
    if (idx == rhs.size()) return i == j;
    const Symbol& y = rhs[idx];
    if (y.kind == SymbolKind::terminal)
      return i < j && toks_[i] == y.name && match_seq(rhs, idx + 1, i + 1, j, tainted);
    for (std::size_t m = i; m <= j; ++m)
      if (derive(y.name, i, m, tainted) && match_seq(rhs, idx + 1, m, j, tainted))
        return true;
    return false;
  }

  const std::vector<std::string>& toks_;
  std::map<std::string, std::vector<const Production*>> prods_;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, bool> memo_;
  std::set<std::tuple<std::string, std::size_t, std::size_t>> inprog_;
};

}  // namespace

bool derives(const Grammar& g, const std::vector<std::string>& tokens) {
  OrigDeriver d(g, tokens);
  bool tainted = false;
  return d.derive(g.start, 0, tokens.size(), tainted);
}

}  // namespace cfsample
