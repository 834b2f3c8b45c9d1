#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/log_value.hpp"
#include "ergodikit/parallel.hpp"
#include "ergodikit/tensor.hpp"
#include "ergodikit/trajectory.hpp"

namespace ergodikit {

using Count = std::uint64_t;

/// Counts of length-L words over the windows starting at positions
/// 1..window_span of a trajectory. Entries are sorted by word code and
/// only observed words are stored.
class GramTable {
 public:
  using Entry = std::pair<WordCode, Count>;

  GramTable(Alphabet alphabet, std::size_t gram_length, std::size_t window_span, std::vector<Entry> entries)
      : alphabet_(alphabet), gram_length_(gram_length), window_span_(window_span), entries_(std::move(entries)) {}

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t gram_length() const noexcept { return gram_length_; }
  std::size_t window_span() const noexcept { return window_span_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t distinct() const noexcept { return entries_.size(); }

  Count count(WordCode word) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), word,
                                     [](const Entry& e, WordCode w) { return e.first < w; });
    return it != entries_.end() && it->first == word ? it->second : 0;
  }
  Count count(std::span<const Symbol> word) const {
    if (word.size() != gram_length_) throw ValidationError("word length does not match the gram length");
    return count(encode_context(word, alphabet_));
  }

  Count total() const {
    Count t = 0;
    for (const auto& e : entries_) t += e.second;
    return t;
  }

 private:
  Alphabet alphabet_;
  std::size_t gram_length_;
  std::size_t window_span_;
  std::vector<Entry> entries_;
};

namespace detail {

inline constexpr WordCode kDenseCountLimit = WordCode{1} << 20;

/// Counts windows [first, last) into a sorted entry list.
inline std::vector<GramTable::Entry> count_range(std::span<const Symbol> x, const Alphabet& alphabet,
                                                 std::size_t length, std::size_t first, std::size_t last) {
  std::vector<GramTable::Entry> out;
  if (first >= last) return out;
  const auto s = static_cast<WordCode>(alphabet.size());
  const WordCode words = alphabet.word_count(length);
  const WordCode high = length > 0 ? words / s : 1;  // s^(L-1)

  auto rolling = [&](auto&& bump) {
    WordCode code = 0;
    for (std::size_t i = 0; i + 1 < length; ++i) code = code * s + x[first + i];
    for (std::size_t k = first; k < last; ++k) {
      if (length > 0) code = (code % high) * s + x[k + length - 1];
      bump(code);
    }
  };

  if (words <= kDenseCountLimit) {
    std::vector<Count> dense(static_cast<std::size_t>(words), 0);
    rolling([&](WordCode c) { ++dense[static_cast<std::size_t>(c)]; });
    for (std::size_t c = 0; c < dense.size(); ++c) {
      if (dense[c] > 0) out.emplace_back(static_cast<WordCode>(c), dense[c]);
    }
  } else {
    std::unordered_map<WordCode, Count> sparse;
    sparse.reserve(std::min<std::size_t>(last - first, 1u << 16));
    rolling([&](WordCode c) { ++sparse[c]; });
    out.assign(sparse.begin(), sparse.end());
    std::sort(out.begin(), out.end());
  }
  return out;
}

inline std::vector<GramTable::Entry> merge_counts(std::vector<std::vector<GramTable::Entry>> parts) {
  std::vector<GramTable::Entry> merged;
  for (auto& part : parts) {
    std::vector<GramTable::Entry> next;
    next.reserve(merged.size() + part.size());
    std::size_t a = 0, b = 0;
    while (a < merged.size() || b < part.size()) {
      if (b == part.size() || (a < merged.size() && merged[a].first < part[b].first)) {
        next.push_back(merged[a++]);
      } else if (a == merged.size() || part[b].first < merged[a].first) {
        next.push_back(part[b++]);
      } else {
        next.emplace_back(merged[a].first, merged[a].second + part[b].second);
        ++a;
        ++b;
      }
    }
    merged.swap(next);
  }
  return merged;
}

}  // namespace detail

/// Counts length-L words over windows k = 1..window_span. The span is a
/// parameter because the defect statistics count two gram lengths over the
/// same span.
inline GramTable count_grams(const Trajectory& x, std::size_t gram_length, std::size_t window_span) {
  const std::size_t n = x.size();
  if (gram_length > n || window_span > n - gram_length + 1) {
    throw ValidationError("window span " + std::to_string(window_span) + " for " + std::to_string(gram_length) +
                          "-grams exceeds n - L + 1 with n = " + std::to_string(n));
  }
  const Alphabet& alphabet = x.alphabet();
  (void)alphabet.word_count(gram_length);  // overflow check

  constexpr std::size_t kChunk = 1 << 18;
  const std::size_t chunks = std::max<std::size_t>(1, (window_span + kChunk - 1) / kChunk);
  std::vector<std::vector<GramTable::Entry>> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t first = c * kChunk;
    const std::size_t last = std::min(window_span, first + kChunk);
    parts[c] = detail::count_range(x.symbols(), alphabet, gram_length, first, last);
  });
  return GramTable(alphabet, gram_length, window_span, detail::merge_counts(std::move(parts)));
}

/// Relative frequencies of (N+1)-grams over the n-N windows.
struct EmpiricalMeasure {
  std::size_t gram_length = 0;
  std::vector<std::pair<WordCode, double>> masses;

  double mass(WordCode word) const {
    const auto it = std::lower_bound(masses.begin(), masses.end(), word,
                                     [](const auto& e, WordCode w) { return e.first < w; });
    return it != masses.end() && it->first == word ? it->second : 0.0;
  }
};

inline EmpiricalMeasure empirical_measure(const Trajectory& x, std::size_t order) {
  if (x.size() <= order) throw ValidationError("empirical measure of order N needs n > N");
  const std::size_t span = x.size() - order;
  const auto table = count_grams(x, order + 1, span);
  EmpiricalMeasure m;
  m.gram_length = order + 1;
  m.masses.reserve(table.distinct());
  for (const auto& [word, c] : table.entries()) {
    m.masses.emplace_back(word, static_cast<double>(c) / static_cast<double>(span));
  }
  return m;
}

/// Transition-frequency estimate of an order-N tensor. Contexts never seen
/// inside the n-N windows are absent; no smoothing is applied.
class TensorEstimate {
 public:
  TensorEstimate(Alphabet alphabet, std::size_t order, std::vector<double> entries, std::vector<bool> observed)
      : alphabet_(alphabet), order_(order), entries_(std::move(entries)), observed_(std::move(observed)) {}

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t context_count() const noexcept { return observed_.size(); }
  bool observed(WordCode context) const { return observed_.at(static_cast<std::size_t>(context)); }

  std::optional<std::span<const double>> row(WordCode context) const {
    if (!observed(context)) return std::nullopt;
    return std::span<const double>(entries_).subspan(static_cast<std::size_t>(context) * alphabet_.size(),
                                                     alphabet_.size());
  }

 private:
  Alphabet alphabet_;
  std::size_t order_;
  std::vector<double> entries_;
  std::vector<bool> observed_;
};

inline TensorEstimate estimate_tensor(const Trajectory& x, std::size_t order) {
  if (x.size() <= order) throw ValidationError("tensor estimate of order N needs n > N");
  const Alphabet& alphabet = x.alphabet();
  const std::size_t s = alphabet.size();
  const std::size_t span = x.size() - order;
  const auto contexts = count_grams(x, order, span);
  const auto transitions = count_grams(x, order + 1, span);

  const auto n_contexts = static_cast<std::size_t>(alphabet.word_count(order));
  std::vector<double> entries(n_contexts * s, 0.0);
  std::vector<bool> observed(n_contexts, false);
  for (const auto& [ctx, c] : contexts.entries()) observed[static_cast<std::size_t>(ctx)] = c > 0;
  for (const auto& [word, c] : transitions.entries()) {
    const auto ctx = static_cast<std::size_t>(word / s);
    entries[static_cast<std::size_t>(word)] = static_cast<double>(c) / static_cast<double>(contexts.count(ctx));
  }
  return TensorEstimate(alphabet, order, std::move(entries), std::move(observed));
}

/// D_n^(N) for one order, as a log value with exact-zero flag.
struct SymmetryDefect {
  std::size_t order = 0;
  LogValue total;
};

/// Gram tables behind the order-N defect terms: N-grams and (N+1)-grams,
/// both over windows 1..n-N.
class DefectStatistics {
 public:
  DefectStatistics(const Trajectory& x, std::size_t order)
      : alphabet_(x.alphabet()),
        order_(order),
        short_grams_(make_table(x, order, order)),
        long_grams_(make_table(x, order + 1, order)) {
    if (order == 0) throw ValidationError("defect terms are defined for N >= 1");
  }

  std::size_t order() const noexcept { return order_; }
  const GramTable& short_grams() const noexcept { return short_grams_; }
  const GramTable& long_grams() const noexcept { return long_grams_; }

  /// Exact cross-product difference for symbols i, j and suffix word s of
  /// length N (given by code).
  __int128 difference(Symbol i, Symbol j, WordCode suffix) const {
    const auto s = static_cast<WordCode>(alphabet_.size());
    const WordCode suffixes = alphabet_.word_count(order_);   // s^N
    const WordCode prefixes = suffixes / s;                   // s^(N-1)
    const WordCode prefix = suffix / s;                       // s_1..s_{N-1}
    const auto ci = static_cast<__int128>(short_grams_.count(i * prefixes + prefix));
    const auto cj = static_cast<__int128>(short_grams_.count(j * prefixes + prefix));
    const auto li = static_cast<__int128>(long_grams_.count(i * suffixes + suffix));
    const auto lj = static_cast<__int128>(long_grams_.count(j * suffixes + suffix));
    return ci * lj - cj * li;
  }

  /// |difference|^N in log space.
  LogValue term(Symbol i, Symbol j, WordCode suffix) const {
    __int128 d = difference(i, j, suffix);
    if (d == 0) return LogValue::zero();
    if (d < 0) d = -d;
    return LogValue::from_log(static_cast<double>(order_) * std::log(static_cast<double>(d)));
  }

  /// Sum of all terms. Only suffixes that end an observed (N+1)-gram can
  /// contribute; they are visited in ascending code order, then i, then j.
  LogValue total() const {
    const auto s = alphabet_.size();
    const WordCode suffixes = alphabet_.word_count(order_);
    std::vector<WordCode> seen;
    seen.reserve(long_grams_.distinct());
    for (const auto& e : long_grams_.entries()) seen.push_back(e.first % suffixes);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

    std::vector<LogValue> terms;
    terms.reserve(seen.size() * s * (s - 1));
    for (WordCode suffix : seen) {
      for (Symbol i = 0; i < s; ++i) {
        for (Symbol j = 0; j < s; ++j) {
          if (i == j) continue;
          const auto t = term(i, j, suffix);
          if (!t.is_zero()) terms.push_back(t);
        }
      }
    }
    return log_sum(terms);
  }

 private:
  static GramTable make_table(const Trajectory& x, std::size_t length, std::size_t order) {
    if (x.size() <= order) throw ValidationError("defect statistics of order N need n > N");
    return count_grams(x, length, x.size() - order);
  }

  Alphabet alphabet_;
  std::size_t order_;
  GramTable short_grams_;
  GramTable long_grams_;
};

/// One defect term |c_N(i,s') c_{N+1}(j,s) - c_N(j,s') c_{N+1}(i,s)|^N with
/// s' the first N-1 symbols of s.
inline LogValue symmetry_defect_term(const Trajectory& x, std::size_t order, Symbol i, Symbol j,
                                     std::span<const Symbol> suffix) {
  if (suffix.size() != order) throw ValidationError("suffix word must have length N");
  if (!x.alphabet().contains(i) || !x.alphabet().contains(j)) throw ValidationError("symbol out of range");
  const DefectStatistics stats(x, order);
  return stats.term(i, j, encode_context(suffix, x.alphabet()));
}

/// D_n^(N); D_n^(0) = n and D_n^(N) = 0 for N >= n by convention.
inline SymmetryDefect symmetry_defect_total(const Trajectory& x, std::size_t order) {
  if (order == 0) return {0, LogValue::from_value(static_cast<double>(x.size()))};
  if (order >= x.size()) return {order, LogValue::zero()};
  return {order, DefectStatistics(x, order).total()};
}

/// D_n^(0..max_order), computed per order in parallel.
inline std::vector<SymmetryDefect> symmetry_defects(const Trajectory& x, std::size_t max_order) {
  std::vector<SymmetryDefect> out(max_order + 1);
  parallel_for(max_order + 1, [&](std::size_t n) { out[n] = symmetry_defect_total(x, n); });
  return out;
}

/// CSV with columns word,count in ascending word order.
inline void write_gram_csv(std::ostream& out, const GramTable& table) {
  out << "word,count\n";
  for (const auto& [code, c] : table.entries()) {
    const auto word = decode_context(code, table.gram_length(), table.alphabet());
    const auto text = word_to_string(word, table.alphabet());
    if (table.alphabet().size() > 10) {
      out << '"' << text << '"';
    } else {
      out << text;
    }
    out << ',' << c << '\n';
  }
}

}  // namespace ergodikit
