#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cfsample/grammar.hpp"

namespace cfsample {

/// Token sequence over the alphabet plus "_" holes. Never empty.
class PorousString {
 public:
  explicit PorousString(std::vector<std::string> tokens);
  /// Splits on whitespace; the hole marker is "_".
  static PorousString parse(std::string_view text);

  std::size_t size() const { return tokens_.size(); }
  bool is_hole(std::size_t i) const { return tokens_[i] == kHoleToken; }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::string to_string() const;

 private:
  std::vector<std::string> tokens_;
};

/// Fixed-capacity bitset over the nonterminals of one grammar.
class NontermSet {
 public:
  NontermSet() = default;
  explicit NontermSet(std::size_t capacity) : words_((capacity + 63) / 64) {}

  void set(SymbolId id) { words_[id >> 6] |= std::uint64_t{1} << (id & 63); }
  bool test(SymbolId id) const {
    return (words_[id >> 6] >> (id & 63)) & 1;
  }
  NontermSet& operator|=(const NontermSet& o);
  bool operator==(const NontermSet&) const = default;
  bool any() const;
  std::size_t count() const;
  std::vector<SymbolId> ids() const; // ascending

 private:
  std::vector<std::uint64_t> words_;
};

/// {w | x in X, z in Z, (w -> x z) a binary rule}.
NontermSet set_product(const NontermSet& x, const NontermSet& z, const CNFGrammar& g);

/// Producers of one token: the terminal's producers, or the union over the
/// whole alphabet for a hole. Throws std::invalid_argument on tokens that are
/// neither in the alphabet nor a hole.
NontermSet leaf_producers(const CNFGrammar& g, std::string_view token);

enum class Schedule { serial, parallel };

/// Strictly upper-triangular matrix of nonterminal sets; cell (i, j) covers
/// tokens i..j-1. Only the populated triangle is stored.
struct SetChart {
  std::size_t n = 0;
  std::vector<NontermSet> cells;

  NontermSet& at(std::size_t i, std::size_t j) { return cells[index(i, j)]; }
  const NontermSet& at(std::size_t i, std::size_t j) const { return cells[index(i, j)]; }
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * n - i * (i - 1) / 2 + (j - i - 1);
  }
  bool operator==(const SetChart&) const = default;
};

/// Fills the chart in span-length order. Cells on the same anti-diagonal are
/// independent; the parallel schedule computes them with OpenMP.
SetChart build_set_chart(const CNFGrammar& g, const PorousString& s,
                         Schedule sched = Schedule::parallel);

/// Reference fixpoint: literally iterates M <- M + M^2 until stable.
/// Produces the identical chart; kept as a witness for the scheduled kernel.
SetChart build_set_chart_power_iteration(const CNFGrammar& g, const PorousString& s,
                                         int* iterations = nullptr);

/// True iff some completion of s is in the grammar's language.
bool recognize(const CNFGrammar& g, const PorousString& s);

}  // namespace cfsample
