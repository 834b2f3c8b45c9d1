#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"

namespace ergodikit {

/// Tolerance on row sums accepted by make_tensor before renormalizing.
inline constexpr double kRowSumTolerance = 1e-12;

/// Order-N conditional law: one next-symbol distribution per length-N
/// context, stored densely as s^N rows of length s in encoded-context order.
///
/// Only transitions (r_1..r_N) -> (r_2..r_N, j) are representable, so the
/// overlap constraint of a stochastic tensor is structural. An order-0
/// tensor is a single row keyed by the empty context.
class StochasticTensor {
 public:
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t context_count() const noexcept { return entries_.size() / alphabet_.size(); }
  bool positive() const noexcept { return positive_; }

  std::span<const double> row(WordCode context) const {
    const auto s = alphabet_.size();
    return std::span<const double>(entries_).subspan(static_cast<std::size_t>(context) * s, s);
  }

  double operator()(WordCode context, Symbol next) const {
    return entries_[static_cast<std::size_t>(context) * alphabet_.size() + next];
  }

  /// All rows concatenated, context-major.
  std::span<const double> entries() const noexcept { return entries_; }

  /// Smallest entry; positivity is judged against this.
  double min_entry() const noexcept {
    double m = entries_.front();
    for (double p : entries_) m = std::min(m, p);
    return m;
  }

 private:
  StochasticTensor(Alphabet alphabet, std::size_t order, std::vector<double> entries, bool positive)
      : alphabet_(alphabet), order_(order), entries_(std::move(entries)), positive_(positive) {}

  friend StochasticTensor make_tensor(std::size_t, std::vector<double>, const Alphabet&, double);

  Alphabet alphabet_;
  std::size_t order_;
  std::vector<double> entries_;
  bool positive_;
};

/// Validates a flat context-major row table and renormalizes each row once.
inline StochasticTensor make_tensor(std::size_t order, std::vector<double> entries, const Alphabet& alphabet,
                                    double tolerance = kRowSumTolerance) {
  const std::size_t s = alphabet.size();
  const WordCode contexts = alphabet.word_count(order);
  if (contexts > entries.max_size() / s) {
    throw ValidationError("tensor of order " + std::to_string(order) + " is too large");
  }
  const std::size_t expected = static_cast<std::size_t>(contexts) * s;
  if (entries.size() != expected) {
    throw ValidationError("tensor of order " + std::to_string(order) + " needs " + std::to_string(contexts) +
                          " rows of length " + std::to_string(s) + " (" + std::to_string(expected) +
                          " entries), got " + std::to_string(entries.size()) + " entries");
  }
  bool positive = true;
  for (std::size_t c = 0; c < contexts; ++c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      const double p = entries[c * s + j];
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError("row " + std::to_string(c) + " has invalid entry " + std::to_string(p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw ValidationError("row " + std::to_string(c) + " sums to " + std::to_string(sum));
    }
    for (std::size_t j = 0; j < s; ++j) {
      double& p = entries[c * s + j];
      if (std::abs(sum - 1.0) > 4 * std::numeric_limits<double>::epsilon()) p /= sum;
      positive = positive && p > 0.0;
    }
  }
  return StochasticTensor(alphabet, order, std::move(entries), positive);
}

/// Row-table overload; rows[c] is the next-symbol law of context code c.
inline StochasticTensor make_tensor(std::size_t order, const std::vector<std::vector<double>>& rows,
                                    const Alphabet& alphabet) {
  const WordCode contexts = alphabet.word_count(order);
  if (rows.size() != contexts) {
    throw ValidationError("missing contexts: order " + std::to_string(order) + " needs " +
                          std::to_string(contexts) + " rows, got " + std::to_string(rows.size()));
  }
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(contexts) * alphabet.size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].size() != alphabet.size()) {
      throw ValidationError("row " + std::to_string(c) + " has length " + std::to_string(rows[c].size()) +
                            ", expected " + std::to_string(alphabet.size()));
    }
    flat.insert(flat.end(), rows[c].begin(), rows[c].end());
  }
  return make_tensor(order, std::move(flat), alphabet);
}

/// Rows of the tensor as a nested table (the JSON "rows" layout).
inline std::vector<std::vector<double>> tensor_rows(const StochasticTensor& tensor) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tensor.context_count());
  for (WordCode c = 0; c < tensor.context_count(); ++c) {
    const auto r = tensor.row(c);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

/// Sparse row-stochastic matrix on the N-th higher shift space: s^N states,
/// each row with exactly s structural entries following the de Bruijn pattern.
class FlattenedMatrix {
 public:
  explicit FlattenedMatrix(const StochasticTensor& tensor)
      : alphabet_(tensor.alphabet()), order_(tensor.order()) {
    if (order_ == 0) {
      throw ValidationError("an order-0 tensor has no higher shift space to flatten onto");
    }
    const std::size_t s = alphabet_.size();
    const WordCode dim = tensor.context_count();
    const WordCode suffixes = dim / s;  // s^(N-1)
    columns_.resize(static_cast<std::size_t>(dim) * s);
    values_.assign(tensor.entries().begin(), tensor.entries().end());
    for (WordCode u = 0; u < dim; ++u) {
      const WordCode shifted = (u % suffixes) * s;
      for (std::size_t j = 0; j < s; ++j) {
        columns_[static_cast<std::size_t>(u) * s + j] = shifted + j;
      }
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t dimension() const noexcept { return values_.size() / alphabet_.size(); }

  std::span<const WordCode> columns(WordCode row) const {
    return std::span<const WordCode>(columns_).subspan(static_cast<std::size_t>(row) * alphabet_.size(),
                                                       alphabet_.size());
  }
  std::span<const double> values(WordCode row) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(row) * alphabet_.size(),
                                                    alphabet_.size());
  }

  /// Entry (u, w); zero off the de Bruijn pattern.
  double at(WordCode u, WordCode w) const {
    const auto cols = columns(u);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] == w) return values(u)[j];
    }
    return 0.0;
  }

  /// Row vector times matrix, v P.
  std::vector<double> left_multiply(std::span<const double> v) const {
    std::vector<double> out(dimension(), 0.0);
    left_multiply(v, out);
    return out;
  }

  void left_multiply(std::span<const double> v, std::span<double> out) const {
    const std::size_t s = alphabet_.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t u = 0; u < dimension(); ++u) {
      const double vu = v[u];
      for (std::size_t j = 0; j < s; ++j) {
        out[columns_[u * s + j]] += vu * values_[u * s + j];
      }
    }
  }

  double min_value() const noexcept {
    double m = values_.front();
    for (double p : values_) m = std::min(m, p);
    return m;
  }

 private:
  Alphabet alphabet_;
  std::size_t order_;
  std::vector<WordCode> columns_;
  std::vector<double> values_;
};

inline FlattenedMatrix flatten(const StochasticTensor& tensor) { return FlattenedMatrix(tensor); }

/// Re-expresses the tensor under a symbol permutation: the result assigns
/// to (sigma(context), sigma(j)) what the input assigns to (context, j).
inline StochasticTensor relabel(const StochasticTensor& tensor, std::span<const Symbol> permutation) {
  const Alphabet& alphabet = tensor.alphabet();
  const std::size_t s = alphabet.size();
  if (permutation.size() != s) {
    throw ValidationError("permutation length must equal the alphabet size");
  }
  std::vector<bool> seen(s, false);
  for (Symbol x : permutation) {
    if (!alphabet.contains(x) || seen[x]) throw ValidationError("not a permutation of the alphabet");
    seen[x] = true;
  }
  std::vector<double> entries(tensor.entries().size());
  for (WordCode c = 0; c < tensor.context_count(); ++c) {
    auto word = decode_context(c, tensor.order(), alphabet);
    for (auto& x : word) x = permutation[x];
    const WordCode image = encode_context(word, alphabet);
    for (std::size_t j = 0; j < s; ++j) {
      entries[static_cast<std::size_t>(image) * s + permutation[j]] = tensor(c, static_cast<Symbol>(j));
    }
  }
  return make_tensor(tensor.order(), std::move(entries), alphabet);
}

/// Context-free tensor of the given order whose every row equals `law`.
inline StochasticTensor iid_tensor(std::size_t order, std::span<const double> law, const Alphabet& alphabet) {
  std::vector<double> entries;
  const WordCode contexts = alphabet.word_count(order);
  entries.reserve(static_cast<std::size_t>(contexts) * law.size());
  for (WordCode c = 0; c < contexts; ++c) entries.insert(entries.end(), law.begin(), law.end());
  return make_tensor(order, std::move(entries), alphabet);
}

}  // namespace ergodikit
