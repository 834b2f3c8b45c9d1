#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "ergodikit.hpp"
#include "oracles.hpp"

using namespace ergodikit;

namespace {

double max_gap(std::span<const double> a, std::span<const double> b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

}  // namespace

TEST(StationaryVector, MatchesMatrixPowerOracle) {
  std::mt19937_64 gen(2024);
  for (auto [s, n] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {2, 3}, {3, 2}, {4, 2}}) {
    const auto t = oracle::random_positive_tensor(s, n, gen);
    const auto v = stationary_vector(flatten(t));
    const auto expect = oracle::stationary_by_squaring(t);
    EXPECT_LT(max_gap(v.weights(), expect), 1e-12) << "s=" << s << " N=" << n;
    EXPECT_LT(v.residual(), 1e-10);
  }
}

TEST(StationaryVector, DenseAndPowerAgree) {
  std::mt19937_64 gen(7);
  const auto t = oracle::random_positive_tensor(2, 6, gen);
  const auto m = flatten(t);
  const auto dense = stationary_vector(m, {.solver = StationarySolver::dense});
  const auto power = stationary_vector(m, {.solver = StationarySolver::power});
  EXPECT_LT(max_gap(dense.weights(), power.weights()), 1e-9);
}

TEST(StationaryVector, LargeStateSpaceUsesPowerIteration) {
  std::mt19937_64 gen(8);
  const auto t = oracle::random_positive_tensor(2, 11, gen);
  const auto v = stationary_vector(flatten(t));
  EXPECT_EQ(v.weights().size(), 2048u);
  EXPECT_LT(v.residual(), 1e-10);
  double sum = 0.0;
  for (double w : v.weights()) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(StationaryVector, RejectsZeroEntries) {
  const auto t = make_tensor(1, std::vector<double>{1.0, 0.0, 0.5, 0.5}, Alphabet(2));
  EXPECT_THROW(stationary_vector(flatten(t)), ValidationError);
  EXPECT_THROW(project_down(t), ValidationError);
}

TEST(StationaryVector, IterationCapRaisesNumericalError) {
  const auto t = make_tensor(1, std::vector<double>{1e-6, 1 - 1e-6, 0.5, 0.5}, Alphabet(2));
  EXPECT_THROW(stationary_vector(flatten(t), {.solver = StationarySolver::power, .max_iterations = 3}),
               NumericalError);
}

TEST(Projection, OrderOneToZeroIsStationaryLaw) {
  // Two-state chain: pi_0 = q / (p + q) for P = [[1-p, p], [q, 1-q]].
  const double p = 0.3;
  const double q = 0.1;
  const auto t = make_tensor(1, std::vector<double>{1 - p, p, q, 1 - q}, Alphabet(2));
  const auto k0 = project_down(t);
  EXPECT_NEAR(k0(0, 0), q / (p + q), 1e-15);
  EXPECT_NEAR(k0(0, 1), p / (p + q), 1e-15);
}

TEST(Projection, IidTensorProjectsToItself) {
  const std::vector<double> law{0.2, 0.5, 0.3};
  const auto t = iid_tensor(2, law, Alphabet(3));
  const auto k1 = project_down(t);
  const auto expect = iid_tensor(1, law, Alphabet(3));
  EXPECT_LT(max_gap(k1.entries(), expect.entries()), 1e-14);
}

TEST(Projection, IdentityWhenTargetEqualsSource) {
  std::mt19937_64 gen(1);
  const auto t = oracle::random_positive_tensor(2, 3, gen);
  const auto same = project_chain(t, 3);
  ASSERT_EQ(same.entries().size(), t.entries().size());
  for (std::size_t i = 0; i < t.entries().size(); ++i) EXPECT_EQ(same.entries()[i], t.entries()[i]);
  EXPECT_THROW(project_chain(t, 4), ValidationError);
}

TEST(Projection, ChainIsCompositionOfSteps) {
  std::mt19937_64 gen(4);
  const auto t = oracle::random_positive_tensor(3, 2, gen);
  const auto direct = project_chain(t, 0);
  const auto stepped = project_down(project_down(t));
  EXPECT_EQ(max_gap(direct.entries(), stepped.entries()), 0.0);
}

TEST(Projection, EquivariantUnderRelabeling) {
  std::mt19937_64 gen(9);
  const auto t = oracle::random_positive_tensor(3, 2, gen);
  const std::vector<Symbol> sigma{1, 2, 0};
  const auto a = project_down(relabel(t, sigma));
  const auto b = relabel(project_down(t), sigma);
  EXPECT_LT(max_gap(a.entries(), b.entries()), 1e-13);
}

TEST(Projection, ProjectedKernelReproducesMarginals) {
  // The order N-1 kernel must be the conditional of the stationary N-word law.
  std::mt19937_64 gen(12);
  const auto t = oracle::random_positive_tensor(2, 3, gen);
  const auto pi = oracle::stationary_by_squaring(t);
  const auto k2 = project_down(t);
  const Alphabet b(2);
  for (const auto& w : oracle::all_words(2, 3)) {
    const oracle::Word ctx(w.begin(), w.end() - 1);
    const double joint = oracle::cylinder_by_marginal(t, pi, w);
    const double marg = oracle::cylinder_by_marginal(t, pi, ctx);
    EXPECT_NEAR(k2(encode_context(ctx, b), w.back()), joint / marg, 1e-12);
  }
}

TEST(ClosedForm, MatchesPerronPipeline) {
  std::mt19937_64 gen(33);
  for (int rep = 0; rep < 20; ++rep) {
    const auto k3 = oracle::random_positive_tensor(2, 3, gen);
    const auto cf = closed_form_binary_order3(k3);
    const auto seq = kernel_sequence(k3);
    EXPECT_LT(max_gap(cf.order2.entries(), seq.kernel(2).entries()), 1e-10);
    EXPECT_LT(max_gap(cf.order1.entries(), seq.kernel(1).entries()), 1e-10);
    EXPECT_LT(max_gap(cf.order0.entries(), seq.kernel(0).entries()), 1e-10);
    EXPECT_GT(cf.c1, 0.0);
    EXPECT_GT(cf.c2, 0.0);
  }
  std::mt19937_64 g3(1);
  EXPECT_THROW(closed_form_binary_order3(oracle::random_positive_tensor(3, 3, g3)), ValidationError);
}

TEST(KernelSequence, ConsistentCheckRejectsCorruption) {
  std::mt19937_64 gen(21);
  const auto seq = kernel_sequence(oracle::random_positive_tensor(2, 2, gen));
  EXPECT_LT(seq.consistency_gap(), 1e-12);
  std::vector<StochasticTensor> kernels(seq.kernels().begin(), seq.kernels().end());
  EXPECT_NO_THROW(KernelSequence(kernels, SequenceCheck::consistent));
  kernels[0] = make_tensor(0, std::vector<double>{0.5, 0.5}, Alphabet(2));
  EXPECT_THROW(KernelSequence(kernels, SequenceCheck::consistent), ValidationError);
  EXPECT_NO_THROW(KernelSequence(kernels, SequenceCheck::structure_only));
  std::vector<StochasticTensor> gap{kernels[1]};
  EXPECT_THROW(KernelSequence(gap, SequenceCheck::structure_only), ValidationError);
}
