#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/empirical.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/log_value.hpp"
#include "ergodikit/parallel.hpp"
#include "ergodikit/sampler.hpp"
#include "ergodikit/trajectory.hpp"

namespace ergodikit {

/// Conjugate update: alpha'(t, j) = alpha(t, j) + #{k <= n-N : X_[k:k+N] = (t, j)}.
/// With n <= N there are no windows and the prior is returned unchanged.
inline DirichletTensorPrior update_dirichlet(const DirichletTensorPrior& prior, const Trajectory& x) {
  if (!(prior.alphabet() == x.alphabet())) throw ValidationError("prior and trajectory alphabets differ");
  const std::size_t order = prior.order();
  if (x.size() <= order) return prior;
  const auto counts = count_grams(x, order + 1, x.size() - order);
  std::vector<double> alphas(prior.alphas().begin(), prior.alphas().end());
  for (const auto& [word, c] : counts.entries()) alphas[static_cast<std::size_t>(word)] += static_cast<double>(c);
  return DirichletTensorPrior(prior.alphabet(), order, std::move(alphas));
}

/// Order update from precomputed defects D_n^(0..max):
///   nu(N | X) = (beta(N) + D^(N)) / (beta total + sum_k D^(k)),
/// with k running over the support 0..max of beta. Everything is assembled
/// in log space in ascending order.
inline OrderDistribution update_order(const OrderDistribution& beta, std::span<const SymmetryDefect> defects) {
  const std::size_t orders = beta.max_order() + 1;
  if (defects.size() < orders) throw ValidationError("missing symmetry defects for some orders");
  std::vector<LogValue> numerators(orders);
  for (std::size_t n = 0; n < orders; ++n) {
    numerators[n] = LogValue::from_value(beta.weights()[n]) + defects[n].total;
  }
  const LogValue denominator = log_sum(numerators);
  std::vector<double> posterior(orders, 0.0);
  double sum = 0.0;
  for (std::size_t n = 0; n < orders; ++n) {
    if (!numerators[n].is_zero()) posterior[n] = std::exp(numerators[n].log() - denominator.log());
    sum += posterior[n];
  }
  // Absorb the last-ulp drift of exp so the law sums to 1.
  for (double& p : posterior) p /= sum;
  return OrderDistribution(std::move(posterior));
}

inline OrderDistribution update_order(const OrderDistribution& beta, const Trajectory& x) {
  const auto defects = symmetry_defects(x, beta.max_order());
  return update_order(beta, defects);
}

/// Data summary kept per order: the window count, the transition table
/// behind the Dirichlet update and the defect D_n^(N).
struct OrderSummary {
  std::size_t order = 0;
  std::size_t windows = 0;
  std::optional<GramTable> transitions;
  SymmetryDefect defect;
};

/// Mixture posterior: order law nu(.|X) and one updated Dirichlet tensor
/// law per order.
struct PosteriorState {
  Alphabet alphabet;
  std::size_t n = 0;
  OrderDistribution order_posterior;
  std::vector<DirichletTensorPrior> tensor_posteriors;
  std::vector<OrderSummary> data_summary;

  std::size_t max_order() const noexcept { return order_posterior.max_order(); }

  std::size_t modal_order() const {
    const auto w = order_posterior.weights();
    return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  }
};

inline PosteriorState full_posterior(const OrderDistribution& order_prior,
                                     std::span<const DirichletTensorPrior> tensor_priors, const Trajectory& x) {
  const std::size_t orders = order_prior.max_order() + 1;
  if (tensor_priors.size() < orders) {
    throw ValidationError("tensor priors must be supplied for every order up to " +
                          std::to_string(order_prior.max_order()));
  }
  for (std::size_t n = 0; n < orders; ++n) {
    if (tensor_priors[n].order() != n) throw ValidationError("tensor prior " + std::to_string(n) + " has wrong order");
  }

  std::vector<std::optional<DirichletTensorPrior>> updated(orders);
  std::vector<OrderSummary> summary(orders);
  parallel_for(orders, [&](std::size_t n) {
    updated[n] = update_dirichlet(tensor_priors[n], x);
    auto& entry = summary[n];
    entry.order = n;
    entry.windows = x.size() > n ? x.size() - n : 0;
    if (entry.windows > 0) entry.transitions = count_grams(x, n + 1, entry.windows);
    entry.defect = symmetry_defect_total(x, n);
  });

  std::vector<SymmetryDefect> defects;
  defects.reserve(orders);
  for (const auto& e : summary) defects.push_back(e.defect);

  std::vector<DirichletTensorPrior> posteriors;
  posteriors.reserve(orders);
  for (auto& u : updated) posteriors.push_back(std::move(*u));

  return PosteriorState{x.alphabet(), x.size(), update_order(order_prior, defects), std::move(posteriors),
                        std::move(summary)};
}

/// Next-symbol law mixing each order's Dirichlet-mean row (at the matching
/// suffix of `window`) by the order posterior. A window shorter than the
/// largest order must be left-padded with `pad`.
inline std::vector<double> posterior_predictive(const PosteriorState& state, std::span<const Symbol> window,
                                                std::optional<Symbol> pad = std::nullopt) {
  const std::size_t top = state.max_order();
  std::vector<Symbol> context(window.begin(), window.end());
  if (context.size() < top) {
    if (!pad) {
      throw ValidationError("context window has " + std::to_string(context.size()) + " symbols; need " +
                            std::to_string(top) + " or a pad symbol");
    }
    context.insert(context.begin(), top - context.size(), *pad);
  }
  const std::size_t s = state.alphabet.size();
  std::vector<double> out(s, 0.0);
  const auto weights = state.order_posterior.normalized();
  for (std::size_t n = 0; n <= top; ++n) {
    if (weights[n] == 0.0) continue;
    const auto suffix = std::span<const Symbol>(context).last(n);
    const auto row = state.tensor_posteriors[n].row(encode_context(suffix, state.alphabet));
    double sum = 0.0;
    for (double a : row) sum += a;
    for (std::size_t j = 0; j < s; ++j) out[j] += weights[n] * row[j] / sum;
  }
  return out;
}

/// log of the multivariate Beta function.
inline double log_multivariate_beta(std::span<const double> alpha) {
  double sum = 0.0;
  double acc = 0.0;
  for (double a : alpha) {
    acc += std::lgamma(a);
    sum += a;
  }
  return acc - std::lgamma(sum);
}

/// Dirichlet-multinomial likelihood of X_{N+1..n} given X_{1..N} under an
/// order-N prior. Benchmark baseline only: it ignores the stationary law of
/// the first N symbols.
inline double conditional_log_marginal(std::size_t order, const DirichletTensorPrior& prior, const Trajectory& x) {
  if (prior.order() != order) throw ValidationError("prior order does not match requested order");
  if (x.size() <= order) throw ValidationError("conditional marginal of order N needs n > N");
  const auto counts = count_grams(x, order + 1, x.size() - order);
  const std::size_t s = x.alphabet().size();
  double total = 0.0;
  std::vector<double> posterior(s);
  const auto entries = counts.entries();
  for (std::size_t i = 0; i < entries.size();) {
    const WordCode ctx = entries[i].first / s;
    const auto prior_row = prior.row(ctx);
    posterior.assign(prior_row.begin(), prior_row.end());
    for (; i < entries.size() && entries[i].first / s == ctx; ++i) {
      posterior[entries[i].first % s] += static_cast<double>(entries[i].second);
    }
    total += log_multivariate_beta(posterior) - log_multivariate_beta(prior_row);
  }
  return total;
}

}  // namespace ergodikit
