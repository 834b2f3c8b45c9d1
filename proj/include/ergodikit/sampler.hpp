#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/projection.hpp"
#include "ergodikit/random.hpp"
#include "ergodikit/tensor.hpp"
#include "ergodikit/trajectory.hpp"

namespace ergodikit {

/// Finite measure on the orders 0..max_order; `normalized()` is the law.
class OrderDistribution {
 public:
  explicit OrderDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ValidationError("order distribution needs at least one weight");
    for (std::size_t n = 0; n < weights_.size(); ++n) {
      if (!std::isfinite(weights_[n]) || weights_[n] < 0.0) {
        throw ValidationError("order weight " + std::to_string(n) + " must be finite and nonnegative");
      }
    }
    if (!(total() > 0.0)) throw ValidationError("order distribution has zero total mass");
  }

  static OrderDistribution uniform(std::size_t max_order, double mass_each = 1.0) {
    return OrderDistribution(std::vector<double>(max_order + 1, mass_each));
  }
  static OrderDistribution point_mass(std::size_t order, std::size_t max_order) {
    if (order > max_order) throw ValidationError("point mass beyond max order");
    std::vector<double> w(max_order + 1, 0.0);
    w[order] = 1.0;
    return OrderDistribution(std::move(w));
  }

  std::size_t max_order() const noexcept { return weights_.size() - 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  double total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
  double probability(std::size_t order) const {
    return order < weights_.size() ? weights_[order] / total() : 0.0;
  }
  std::vector<double> normalized() const {
    std::vector<double> p(weights_);
    const double t = total();
    for (double& x : p) x /= t;
    return p;
  }

 private:
  std::vector<double> weights_;
};

/// Independent Dirichlet laws, one per length-N context, over next symbols.
class DirichletTensorPrior {
 public:
  DirichletTensorPrior(Alphabet alphabet, std::size_t order, std::vector<double> alphas)
      : alphabet_(alphabet), order_(order), alphas_(std::move(alphas)) {
    const auto expected = static_cast<std::size_t>(alphabet_.word_count(order_)) * alphabet_.size();
    if (alphas_.size() != expected) {
      throw ValidationError("Dirichlet prior of order " + std::to_string(order_) + " needs " +
                            std::to_string(expected) + " parameters, got " + std::to_string(alphas_.size()));
    }
    for (double a : alphas_) {
      if (!std::isfinite(a) || !(a > 0.0)) throw ValidationError("Dirichlet parameters must be positive");
    }
  }

  static DirichletTensorPrior uniform(Alphabet alphabet, std::size_t order, double alpha) {
    const auto cells = static_cast<std::size_t>(alphabet.word_count(order)) * alphabet.size();
    return DirichletTensorPrior(alphabet, order, std::vector<double>(cells, alpha));
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t context_count() const noexcept { return alphas_.size() / alphabet_.size(); }
  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const double> row(WordCode context) const {
    return std::span<const double>(alphas_).subspan(static_cast<std::size_t>(context) * alphabet_.size(),
                                                    alphabet_.size());
  }
  double operator()(WordCode context, Symbol next) const {
    return alphas_[static_cast<std::size_t>(context) * alphabet_.size() + next];
  }

  /// Row-wise Dirichlet means alpha / sum(alpha).
  StochasticTensor mean() const {
    std::vector<double> entries(alphas_);
    const std::size_t s = alphabet_.size();
    for (std::size_t c = 0; c < context_count(); ++c) {
      double sum = 0.0;
      for (std::size_t j = 0; j < s; ++j) sum += entries[c * s + j];
      for (std::size_t j = 0; j < s; ++j) entries[c * s + j] /= sum;
    }
    return make_tensor(order_, std::move(entries), alphabet_);
  }

  friend bool operator==(const DirichletTensorPrior&, const DirichletTensorPrior&) = default;

 private:
  Alphabet alphabet_;
  std::size_t order_;
  std::vector<double> alphas_;
};

/// Index drawn from a discrete law given by nonnegative weights.
inline std::size_t sample_index(std::span<const double> weights, double total, CounterRng& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

/// Stage 1: N ~ nu.
inline std::size_t sample_order(const OrderDistribution& nu, CounterRng& rng) {
  return sample_index(nu.weights(), nu.total(), rng);
}

/// Stage 2: kappa_N row-wise from independent Dirichlet laws (normalized
/// Gamma variates, combined in log space).
inline StochasticTensor sample_tensor(const DirichletTensorPrior& prior, CounterRng& rng) {
  const std::size_t s = prior.alphabet().size();
  std::vector<double> entries(prior.alphas().size());
  std::vector<double> logs(s);
  for (std::size_t c = 0; c < prior.context_count(); ++c) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s; ++j) {
      logs[j] = log_gamma_variate(prior(c, static_cast<Symbol>(j)), rng);
      hi = std::max(hi, logs[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      // Floor keeps rows representably positive when alpha is tiny.
      entries[c * s + j] = std::max(std::exp(logs[j] - hi), kPositivityFloor * 10);
      sum += entries[c * s + j];
    }
    for (std::size_t j = 0; j < s; ++j) entries[c * s + j] /= sum;
  }
  return make_tensor(prior.order(), std::move(entries), prior.alphabet());
}

/// Stage 3: X_1 ~ kappa_0 and X_k ~ kappa_{min(k-1,N)} given the preceding
/// min(k-1,N) symbols, i.e. exactly the product measure of the chain.
inline Trajectory sample_trajectory(const KernelSequence& seq, std::size_t n, CounterRng& rng) {
  if (n == 0) throw ValidationError("trajectory length must be at least 1");
  const Alphabet& alphabet = seq.alphabet();
  const auto s = static_cast<WordCode>(alphabet.size());
  const std::size_t top = seq.top_order();
  const WordCode top_contexts = alphabet.word_count(top);

  std::vector<Symbol> x;
  x.reserve(n);
  WordCode ctx = 0;  // code of the last min(k, N) symbols
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = std::min(k, top);
    const auto row = seq.kernel(m).row(ctx);
    const auto next = static_cast<Symbol>(sample_index(row, 1.0, rng));
    x.push_back(next);
    if (m < top) {
      ctx = ctx * s + next;
    } else if (top > 0) {
      ctx = (ctx * s + next) % top_contexts;
    }
  }
  return Trajectory(alphabet, std::move(x));
}

}  // namespace ergodikit
