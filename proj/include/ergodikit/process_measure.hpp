#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/projection.hpp"

namespace ergodikit {

/// Largest number of words stationarity_residual will enumerate (2^12).
inline constexpr WordCode kMaxResidualWords = 4096;

namespace detail {

/// Conditional law used for position k (0-based) of a word: kappa_{min(k,N)}
/// applied to the preceding min(k,N) symbols.
inline double cylinder_factor(const KernelSequence& seq, std::span<const Symbol> word, std::size_t k) {
  const std::size_t m = std::min(k, seq.top_order());
  const WordCode ctx = encode_context(word.subspan(k - m, m), seq.alphabet());
  return seq.kernel(m)(ctx, word[k]);
}

inline void check_word(const KernelSequence& seq, std::span<const Symbol> word) {
  for (Symbol x : word) {
    if (!seq.alphabet().contains(x)) throw ValidationError("cylinder word symbol out of range");
  }
}

}  // namespace detail

/// log Q([x_1..x_m]); -inf for a null cylinder.
inline double log_cylinder_probability(const KernelSequence& seq, std::span<const Symbol> word) {
  detail::check_word(seq, word);
  double log_p = 0.0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const double f = detail::cylinder_factor(seq, word, k);
    if (f <= 0.0) return -std::numeric_limits<double>::infinity();
    log_p += std::log(f);
  }
  return log_p;
}

/// Q([x_1..x_m]) = kappa_0(x_1) kappa_1(x_2|x_1) ... with kappa_N rolled for
/// positions beyond N+1. Words longer than 64 go through log space.
inline double cylinder_probability(const KernelSequence& seq, std::span<const Symbol> word) {
  if (word.size() > 64) return std::exp(log_cylinder_probability(seq, word));
  detail::check_word(seq, word);
  double p = 1.0;
  for (std::size_t k = 0; k < word.size(); ++k) p *= detail::cylinder_factor(seq, word, k);
  return p;
}

struct StationarityReport {
  double max_residual = 0.0;
  std::vector<Symbol> worst_word;
};

/// Largest violation of sum_j Q([j,t]) = Q([t]) = sum_j Q([t,j]) over all
/// words t of length 1..depth.
inline StationarityReport stationarity_residual(const KernelSequence& seq, std::size_t depth) {
  const Alphabet& alphabet = seq.alphabet();
  const std::size_t s = alphabet.size();
  if (depth > 0 && alphabet.word_count(depth) > kMaxResidualWords) {
    throw ValidationError("depth " + std::to_string(depth) + " would enumerate more than 4096 words");
  }

  StationarityReport report;
  std::vector<Symbol> extended;
  for (std::size_t len = 1; len <= depth; ++len) {
    const WordCode count = alphabet.word_count(len);
    for (WordCode code = 0; code < count; ++code) {
      const auto t = decode_context(code, len, alphabet);
      const double qt = cylinder_probability(seq, t);

      extended.assign(t.begin(), t.end());
      extended.push_back(0);
      double right = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        extended.back() = static_cast<Symbol>(j);
        right += cylinder_probability(seq, extended);
      }

      extended.assign(1, 0);
      extended.insert(extended.end(), t.begin(), t.end());
      double left = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        extended.front() = static_cast<Symbol>(j);
        left += cylinder_probability(seq, extended);
      }

      const double r = std::max(std::abs(left - qt), std::abs(right - qt));
      if (report.worst_word.empty() || r > report.max_residual) {
        report.max_residual = r;
        report.worst_word = t;
      }
    }
  }
  return report;
}

}  // namespace ergodikit
