#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "ergodikit.hpp"
#include "oracles.hpp"

using namespace ergodikit;

TEST(CounterRng, DeterministicPerSeedAndStream) {
  CounterRng a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
  EXPECT_EQ(a.counter(), 100u);
}

TEST(CounterRng, UniformIsOpenUnitInterval) {
  CounterRng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.003);
}

TEST(CounterRng, SplitDoesNotAdvanceParent) {
  CounterRng a(5);
  auto child = a.split(9);
  EXPECT_EQ(a.counter(), 0u);
  CounterRng b(5);
  EXPECT_EQ(a(), b());
  EXPECT_NE(child(), CounterRng(5).split(10)());
}

TEST(Gamma, MomentsMatchShape) {
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    CounterRng rng(7, static_cast<std::uint64_t>(shape * 10));
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = std::exp(log_gamma_variate(shape, rng));
      m1 += g;
      m2 += g * g;
    }
    m1 /= n;
    const double var = m2 / n - m1 * m1;
    EXPECT_NEAR(m1, shape, 5 * std::sqrt(shape / n)) << shape;
    EXPECT_NEAR(var / shape, 1.0, 0.05) << shape;
  }
}

TEST(Gamma, TinyShapeStaysFinite) {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double lg = log_gamma_variate(1e-3, rng);
    ASSERT_TRUE(std::isfinite(lg));
  }
}

TEST(OrderDistribution, ValidationAndNormalization) {
  EXPECT_THROW(OrderDistribution(std::vector<double>{}), ValidationError);
  EXPECT_THROW(OrderDistribution(std::vector<double>{0.0, 0.0}), ValidationError);
  EXPECT_THROW(OrderDistribution(std::vector<double>{1.0, -1.0}), ValidationError);
  const OrderDistribution nu(std::vector<double>{1.0, 3.0});
  EXPECT_DOUBLE_EQ(nu.probability(1), 0.75);
  EXPECT_DOUBLE_EQ(nu.probability(5), 0.0);
  EXPECT_THROW(OrderDistribution::point_mass(3, 2), ValidationError);
}

TEST(SampleOrder, FrequenciesFollowWeights) {
  const OrderDistribution nu(std::vector<double>{1.0, 0.0, 2.0, 1.0});
  CounterRng rng(11);
  std::vector<int> hits(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hits[sample_order(nu, rng)];
  EXPECT_EQ(hits[1], 0);
  EXPECT_NEAR(hits[2] / double(n), 0.5, 0.01);
  EXPECT_NEAR(hits[0] / double(n), 0.25, 0.01);
  CounterRng r2(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_order(OrderDistribution::point_mass(2, 5), r2), 2u);
}

TEST(SampleTensor, RowMeansFollowDirichletMean) {
  const Alphabet a(3);
  DirichletTensorPrior prior(a, 1, {1.0, 2.0, 3.0, 0.5, 0.5, 1.0, 4.0, 1.0, 1.0});
  const auto mean = prior.mean();
  CounterRng rng(99);
  std::vector<double> acc(9, 0.0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const auto t = sample_tensor(prior, rng);
    ASSERT_TRUE(t.positive());
    for (std::size_t i = 0; i < 9; ++i) acc[i] += t.entries()[i];
  }
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(acc[i] / reps, mean.entries()[i], 0.01) << i;
}

TEST(SampleTensor, TinyAlphaStillPositive) {
  const auto prior = DirichletTensorPrior::uniform(Alphabet(2), 2, 1e-4);
  CounterRng rng(5);
  for (int r = 0; r < 50; ++r) EXPECT_TRUE(sample_tensor(prior, rng).positive());
}

TEST(DirichletPrior, Validation) {
  EXPECT_THROW(DirichletTensorPrior(Alphabet(2), 1, {1.0, 1.0}), ValidationError);
  EXPECT_THROW(DirichletTensorPrior(Alphabet(2), 0, {1.0, 0.0}), ValidationError);
}

TEST(SampleTrajectory, DeterministicAndStationaryFrequencies) {
  std::mt19937_64 gen(1);
  const auto seq = kernel_sequence(oracle::random_positive_tensor(2, 2, gen));
  CounterRng r1(8, 3), r2(8, 3);
  const auto x = sample_trajectory(seq, 50000, r1);
  const auto y = sample_trajectory(seq, 50000, r2);
  ASSERT_TRUE(std::equal(x.symbols().begin(), x.symbols().end(), y.symbols().begin()));
  const auto counts = oracle::naive_counts(x, 3, x.size() - 2);
  for (const auto& w : oracle::all_words(2, 3)) {
    const double freq = oracle::lookup(counts, w) / double(x.size() - 2);
    EXPECT_NEAR(freq, cylinder_probability(seq, w), 0.015);
  }
  EXPECT_THROW(sample_trajectory(seq, 0, r1), ValidationError);
}

TEST(TrajectoryFile, RoundTripDigitsAndCommas) {
  for (std::size_t s : {2u, 12u}) {
    std::mt19937_64 gen(s);
    const auto x = oracle::random_trajectory(s, 500, gen);
    std::stringstream io;
    const std::vector<std::string> comments{"note"};
    write_trajectory(io, x, comments);
    const auto y = read_trajectory(io, s);
    EXPECT_EQ(y.alphabet().size(), s);
    ASSERT_EQ(y.size(), x.size());
    EXPECT_TRUE(std::equal(x.symbols().begin(), x.symbols().end(), y.symbols().begin()));
  }
}

TEST(TrajectoryFile, Errors) {
  std::stringstream empty("#alphabet=2\n");
  EXPECT_THROW(read_trajectory(empty), ValidationError);
  std::stringstream mismatch("#alphabet=3\n0120");
  EXPECT_THROW(read_trajectory(mismatch, 2), ValidationError);
  std::stringstream out_of_range("#alphabet=2\n0102");
  EXPECT_THROW(read_trajectory(out_of_range), ValidationError);
  std::stringstream junk("01a1");
  EXPECT_THROW(read_trajectory(junk), ValidationError);
  std::stringstream bare("0 1\n1 0\n");
  EXPECT_EQ(read_trajectory(bare).size(), 4u);
}
