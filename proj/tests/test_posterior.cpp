#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ergodikit.hpp"
#include "oracles.hpp"

using namespace ergodikit;

TEST(UpdateDirichlet, AddsTransitionCounts) {
  std::mt19937_64 gen(1);
  const auto x = oracle::random_trajectory(3, 400, gen);
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto prior = DirichletTensorPrior::uniform(Alphabet(3), n, 0.5);
    const auto post = update_dirichlet(prior, x);
    const auto counts = oracle::naive_counts(x, n + 1, x.size() - n);
    for (const auto& w : oracle::all_words(3, n + 1)) {
      const auto code = encode_context(w, Alphabet(3));
      EXPECT_EQ(post.alphas()[code], 0.5 + static_cast<double>(oracle::lookup(counts, w)));
    }
  }
}

TEST(UpdateDirichlet, ShortDataLeavesPriorAndChecksAlphabet) {
  const Trajectory x(Alphabet(2), {0, 1});
  const auto prior = DirichletTensorPrior::uniform(Alphabet(2), 2, 1.0);
  EXPECT_EQ(update_dirichlet(prior, x), prior);
  EXPECT_THROW(update_dirichlet(DirichletTensorPrior::uniform(Alphabet(3), 1, 1.0), x), ValidationError);
}

TEST(UpdateOrder, MatchesDirectFormula) {
  std::mt19937_64 gen(2);
  const auto x = oracle::random_trajectory(2, 60, gen);
  const OrderDistribution beta(std::vector<double>{0.5, 1.0, 2.0, 0.25});
  const auto post = update_order(beta, x).normalized();
  std::vector<double> num(4);
  double den = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double d = n == 0 ? 60.0 : std::exp(static_cast<double>(oracle::brute_force_defect(x, n).log_total));
    num[n] = beta.weights()[n] + d;
    den += num[n];
  }
  for (std::size_t n = 0; n < 4; ++n) EXPECT_NEAR(post[n], num[n] / den, 1e-12);
}

TEST(UpdateOrder, ConstantDataFavoursOrderZero) {
  const Trajectory x(Alphabet(2), std::vector<Symbol>(5000, 0));
  const auto post = update_order(OrderDistribution::uniform(4), x).normalized();
  EXPECT_GT(post[0], 0.999);
}

TEST(UpdateOrder, AlternatingDataFavoursOrderOne) {
  std::vector<Symbol> xs(5000);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = static_cast<Symbol>(k % 2);
  const auto post = update_order(OrderDistribution::uniform(4), Trajectory(Alphabet(2), xs)).normalized();
  EXPECT_GT(post[1], 0.999);
}

TEST(UpdateOrder, EmptyDefectsFallBackToPrior) {
  const Trajectory x(Alphabet(2), {1});
  const OrderDistribution beta(std::vector<double>{0.0, 1.0, 3.0});
  const auto post = update_order(beta, x).normalized();
  // D^(0) = 1, D^(1) = D^(2) = 0.
  EXPECT_NEAR(post[0], 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(post[2], 3.0 / 5.0, 1e-15);
}

TEST(UpdateOrder, HugeDefectsStayFinite) {
  std::vector<SymmetryDefect> d{{0, LogValue::from_value(1e6)}, {1, LogValue::from_log(5000.0)},
                                {2, LogValue::from_log(5001.0)}, {3, LogValue::zero()}};
  const auto post = update_order(OrderDistribution::uniform(3), d).normalized();
  double sum = 0.0;
  for (double p : post) {
    EXPECT_TRUE(std::isfinite(p));
    sum += p;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(post[2] / post[1], std::exp(1.0), 1e-9);
  EXPECT_EQ(post[0], 0.0);
}

TEST(FullPosterior, CombinesOrderAndTensorUpdates) {
  std::mt19937_64 gen(3);
  const auto seq = kernel_sequence(oracle::random_positive_tensor(2, 1, gen));
  CounterRng rng(4);
  const auto x = sample_trajectory(seq, 3000, rng);
  const OrderDistribution beta(std::vector<double>{1.0, 1.0});
  std::vector<DirichletTensorPrior> priors{DirichletTensorPrior::uniform(Alphabet(2), 0, 1.0),
                                           DirichletTensorPrior::uniform(Alphabet(2), 1, 1.0)};
  const auto state = full_posterior(beta, priors, x);
  EXPECT_EQ(state.n, 3000u);
  EXPECT_EQ(state.max_order(), 1u);
  EXPECT_EQ(state.tensor_posteriors[1], update_dirichlet(priors[1], x));
  EXPECT_EQ(state.data_summary[1].windows, 2999u);
  ASSERT_TRUE(state.data_summary[1].transitions.has_value());
  EXPECT_EQ(state.data_summary[1].transitions->total(), 2999u);
  const auto direct = update_order(beta, x).normalized();
  const auto stored = state.order_posterior.normalized();
  for (std::size_t n = 0; n < 2; ++n) EXPECT_DOUBLE_EQ(stored[n], direct[n]);

  std::vector<DirichletTensorPrior> short_priors{priors[0]};
  EXPECT_THROW(full_posterior(beta, short_priors, x), ValidationError);
  std::vector<DirichletTensorPrior> swapped{priors[1], priors[0]};
  EXPECT_THROW(full_posterior(beta, swapped, x), ValidationError);
}

TEST(PosteriorPredictive, MixesRowMeans) {
  const Trajectory x(Alphabet(2), {0, 1, 1, 1, 0, 1});
  const OrderDistribution beta(std::vector<double>{1.0, 1.0});
  std::vector<DirichletTensorPrior> priors{DirichletTensorPrior::uniform(Alphabet(2), 0, 1.0),
                                           DirichletTensorPrior::uniform(Alphabet(2), 1, 1.0)};
  const auto state = full_posterior(beta, priors, x);
  const std::vector<Symbol> window{1};
  const auto pred = posterior_predictive(state, window);
  const auto w = state.order_posterior.normalized();
  const auto m0 = state.tensor_posteriors[0].mean();
  const auto m1 = state.tensor_posteriors[1].mean();
  EXPECT_NEAR(pred[0], w[0] * m0(0, 0) + w[1] * m1(1, 0), 1e-15);
  EXPECT_NEAR(pred[0] + pred[1], 1.0, 1e-15);
  EXPECT_THROW(posterior_predictive(state, std::vector<Symbol>{}), ValidationError);
  EXPECT_NO_THROW(posterior_predictive(state, std::vector<Symbol>{}, Symbol{0}));
}

TEST(ConditionalMarginal, MatchesSequentialPolyaUrn) {
  std::mt19937_64 gen(5);
  const auto x = oracle::random_trajectory(3, 80, gen);
  const std::size_t n = 1;
  const auto prior = DirichletTensorPrior::uniform(Alphabet(3), n, 0.7);
  // Sequential predictive product: P(x_k | past) = (alpha + c) / (sum alpha + total).
  std::vector<double> alpha(prior.alphas().begin(), prior.alphas().end());
  double log_p = 0.0;
  for (std::size_t k = n; k < x.size(); ++k) {
    const std::size_t ctx = x[k - 1];
    const double row_sum = alpha[ctx * 3] + alpha[ctx * 3 + 1] + alpha[ctx * 3 + 2];
    log_p += std::log(alpha[ctx * 3 + x[k]] / row_sum);
    alpha[ctx * 3 + x[k]] += 1.0;
  }
  EXPECT_NEAR(conditional_log_marginal(n, prior, x), log_p, 1e-10);
  EXPECT_THROW(conditional_log_marginal(2, prior, x), ValidationError);
}

TEST(LogMultivariateBeta, KnownValues) {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  EXPECT_NEAR(log_multivariate_beta(ones), -std::log(2.0), 1e-14);
  const std::vector<double> halves{0.5, 0.5};
  EXPECT_NEAR(log_multivariate_beta(halves), std::log(std::acos(-1.0)), 1e-14);
}
