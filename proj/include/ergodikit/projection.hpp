#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/tensor.hpp"

namespace ergodikit {

/// Smallest tensor entry accepted as "positive" by the projections.
inline constexpr double kPositivityFloor = 1e-300;
/// Fixed-point residual every produced stationary vector must meet.
inline constexpr double kStationaryResidualTolerance = 1e-10;
/// Row-sum slack for the ratio rows produced from a stationary vector.
inline constexpr double kRenormalizationTolerance = 1e-8;

enum class StationarySolver { automatic, dense, power };

struct StationaryOptions {
  StationarySolver solver = StationarySolver::automatic;
  /// automatic uses the dense solve up to this many states.
  std::size_t dense_limit = 1024;
  double stop_tolerance = 1e-14;
  std::size_t max_iterations = 1'000'000;
  double residual_tolerance = kStationaryResidualTolerance;
};

/// Probability row vector v over the s^N contexts of order N with v P = v.
class StationaryVector {
 public:
  StationaryVector(Alphabet alphabet, std::size_t order, std::vector<double> weights, double residual)
      : alphabet_(alphabet), order_(order), weights_(std::move(weights)), residual_(residual) {}

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t order() const noexcept { return order_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](WordCode context) const { return weights_[static_cast<std::size_t>(context)]; }
  /// ||vP - v||_inf at construction.
  double residual() const noexcept { return residual_; }

 private:
  Alphabet alphabet_;
  std::size_t order_;
  std::vector<double> weights_;
  double residual_;
};

inline double stationary_residual(const FlattenedMatrix& matrix, std::span<const double> v) {
  const auto vp = matrix.left_multiply(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < vp.size(); ++i) worst = std::max(worst, std::abs(vp[i] - v[i]));
  return worst;
}

namespace detail {

inline std::vector<double> stationary_dense(const FlattenedMatrix& matrix) {
  const auto r = static_cast<Eigen::Index>(matrix.dimension());
  // (P^T - I) v = 0 with the last equation replaced by sum(v) = 1.
  Eigen::MatrixXd system = -Eigen::MatrixXd::Identity(r, r);
  for (Eigen::Index u = 0; u < r; ++u) {
    const auto cols = matrix.columns(static_cast<WordCode>(u));
    const auto vals = matrix.values(static_cast<WordCode>(u));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      system(static_cast<Eigen::Index>(cols[j]), u) += vals[j];
    }
  }
  system.row(r - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
  rhs(r - 1) = 1.0;
  const Eigen::VectorXd v = system.partialPivLu().solve(rhs);
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::vector<double> stationary_power(const FlattenedMatrix& matrix, const StationaryOptions& options) {
  const std::size_t r = matrix.dimension();
  std::vector<double> v(r, 1.0 / static_cast<double>(r));
  std::vector<double> next(r);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    matrix.left_multiply(v, next);
    double total = 0.0;
    for (double x : next) total += x;
    double change = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      next[i] /= total;
      change = std::max(change, std::abs(next[i] - v[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    v.swap(next);
    if (change <= options.stop_tolerance * scale) return v;
  }
  throw NumericalError("power iteration did not converge within " + std::to_string(options.max_iterations) +
                       " iterations");
}

}  // namespace detail

/// Perron projection of a flattened positive tensor: the unique stationary
/// probability row vector. Small problems use a dense solve of the singular
/// system, large ones power iteration from the uniform vector.
inline StationaryVector stationary_vector(const FlattenedMatrix& matrix, const StationaryOptions& options = {}) {
  if (!(matrix.min_value() > kPositivityFloor)) {
    throw ValidationError("stationary vector requires a positive tensor (all structural entries > 1e-300)");
  }
  bool dense = options.solver == StationarySolver::dense;
  if (options.solver == StationarySolver::automatic) dense = matrix.dimension() <= options.dense_limit;

  std::vector<double> v = dense ? detail::stationary_dense(matrix) : detail::stationary_power(matrix, options);

  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw NumericalError("stationary vector has a non-finite or negative weight");
    }
  }
  const double residual = stationary_residual(matrix, v);
  if (!(residual < options.residual_tolerance)) {
    throw NumericalError("stationary vector residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return StationaryVector(matrix.alphabet(), matrix.order(), std::move(v), residual);
}

/// zeta_N: turns a stationary vector over length-N words into the order N-1
/// tensor p(t_N | t_1..t_{N-1}) = v_t / sum_j v_(j, t_1..t_{N-1}).
inline StochasticTensor renormalize_stationary(const StationaryVector& v) {
  const Alphabet& alphabet = v.alphabet();
  const std::size_t n = v.order();
  if (n == 0) throw ValidationError("cannot renormalize an order-0 vector");
  const std::size_t s = alphabet.size();
  const WordCode contexts = alphabet.word_count(n - 1);

  std::vector<double> entries(static_cast<std::size_t>(contexts) * s);
  for (WordCode ctx = 0; ctx < contexts; ++ctx) {
    double denominator = 0.0;
    for (std::size_t j = 0; j < s; ++j) denominator += v[static_cast<WordCode>(j) * contexts + ctx];
    if (!(denominator > 0.0)) {
      throw NumericalError("zero denominator renormalizing context " + std::to_string(ctx));
    }
    for (std::size_t next = 0; next < s; ++next) {
      entries[static_cast<std::size_t>(ctx) * s + next] = v[ctx * s + next] / denominator;
    }
  }
  return make_tensor(n - 1, std::move(entries), alphabet, kRenormalizationTolerance);
}

inline void require_positive(const StochasticTensor& tensor) {
  if (!(tensor.min_entry() > kPositivityFloor)) {
    throw ValidationError("tensor of order " + std::to_string(tensor.order()) +
                          " is not positive (entries must exceed 1e-300)");
  }
}

/// phi_N = zeta_N o gamma_N.
inline StochasticTensor project_down(const StochasticTensor& tensor, const StationaryOptions& options = {}) {
  require_positive(tensor);
  if (tensor.order() == 0) throw ValidationError("cannot project an order-0 tensor down");
  return renormalize_stationary(stationary_vector(flatten(tensor), options));
}

/// psi_{M,N}: repeated project_down from the tensor's order N to M.
inline StochasticTensor project_chain(const StochasticTensor& tensor, std::size_t target_order,
                                      const StationaryOptions& options = {}) {
  if (target_order > tensor.order()) {
    throw ValidationError("target order " + std::to_string(target_order) + " exceeds source order " +
                          std::to_string(tensor.order()));
  }
  require_positive(tensor);
  StochasticTensor current = tensor;
  while (current.order() > target_order) current = project_down(current, options);
  return current;
}

enum class SequenceCheck { consistent, structure_only };

/// Finite chain (kappa_0, ..., kappa_N) of kernels of increasing order.
/// By default construction verifies that every kernel is the projection of
/// the next within 1e-10; structure_only admits inconsistent chains for
/// diagnostics.
class KernelSequence {
 public:
  static constexpr double kConsistencyTolerance = 1e-10;

  explicit KernelSequence(std::vector<StochasticTensor> kernels, SequenceCheck check = SequenceCheck::consistent)
      : kernels_(std::move(kernels)) {
    if (kernels_.empty()) throw ValidationError("kernel sequence is empty");
    for (std::size_t m = 0; m < kernels_.size(); ++m) {
      if (kernels_[m].order() != m) {
        throw ValidationError("kernel " + std::to_string(m) + " has order " + std::to_string(kernels_[m].order()));
      }
      if (!(kernels_[m].alphabet() == kernels_.front().alphabet())) {
        throw ValidationError("kernels use different alphabets");
      }
    }
    if (check == SequenceCheck::consistent) {
      for (const auto& k : kernels_) require_positive(k);
      const double gap = consistency_gap();
      if (!(gap <= kConsistencyTolerance)) {
        throw ValidationError("kernel sequence is not projection-consistent (gap " + std::to_string(gap) + ")");
      }
    }
  }

  const Alphabet& alphabet() const noexcept { return kernels_.front().alphabet(); }
  std::size_t top_order() const noexcept { return kernels_.size() - 1; }
  const StochasticTensor& kernel(std::size_t order) const { return kernels_.at(order); }
  const StochasticTensor& top() const noexcept { return kernels_.back(); }
  std::span<const StochasticTensor> kernels() const noexcept { return kernels_; }

  /// Largest entrywise |kappa_M - project_down(kappa_{M+1})| over the chain.
  double consistency_gap() const {
    double gap = 0.0;
    for (std::size_t m = 0; m + 1 < kernels_.size(); ++m) {
      const auto projected = project_down(kernels_[m + 1]);
      const auto lower = kernels_[m].entries();
      const auto proj = projected.entries();
      for (std::size_t i = 0; i < lower.size(); ++i) gap = std::max(gap, std::abs(lower[i] - proj[i]));
    }
    return gap;
  }

 private:
  std::vector<StochasticTensor> kernels_;
};

/// The full consistent chain determined by a positive top kernel.
inline KernelSequence kernel_sequence(const StochasticTensor& tensor, const StationaryOptions& options = {}) {
  require_positive(tensor);
  std::vector<StochasticTensor> chain{tensor};
  while (chain.back().order() > 0) chain.push_back(project_down(chain.back(), options));
  std::reverse(chain.begin(), chain.end());
  return KernelSequence(std::move(chain), SequenceCheck::structure_only);
}

/// Explicit solutions of the binary order-3 stationarity equations,
/// evaluated literally. Meant as an oracle independent of the Perron route.
struct BinaryOrder3Solution {
  StochasticTensor order2;
  StochasticTensor order1;
  StochasticTensor order0;
  double c1;
  double c2;
};

inline BinaryOrder3Solution closed_form_binary_order3(const StochasticTensor& kappa3) {
  if (kappa3.alphabet().size() != 2 || kappa3.order() != 3) {
    throw ValidationError("closed form applies to binary order-3 tensors only");
  }
  require_positive(kappa3);
  // p("abc", "bcj") is the probability of jumping from context abc to bcj.
  const auto p = [&](const char* upper, const char* lower) {
    const WordCode ctx = static_cast<WordCode>((upper[0] - '0') * 4 + (upper[1] - '0') * 2 + (upper[2] - '0'));
    return kappa3(ctx, static_cast<Symbol>(lower[2] - '0'));
  };

  const double den = 1.0 + (p("101", "010") - p("001", "010")) * (p("010", "100") - p("110", "100"));
  const double head = p("100", "000") + p("000", "001");
  const double tail = p("111", "110") + p("011", "111");

  const double k2_00_0 = p("100", "000") / head;
  const double k2_00_1 = p("000", "001") / head;
  const double k2_01_0 = (p("101", "010") + p("110", "100") * (p("001", "010") - p("101", "010"))) / den;
  const double k2_01_1 = (p("101", "011") - p("010", "100") * (p("001", "010") - p("101", "010"))) / den;
  const double k2_10_0 = (p("110", "100") + p("101", "010") * (p("010", "100") - p("110", "100"))) / den;
  const double k2_10_1 = (p("110", "101") - p("001", "010") * (p("010", "100") - p("110", "100"))) / den;
  const double k2_11_0 = p("111", "110") / tail;
  const double k2_11_1 = p("011", "111") / tail;

  const double c1 = head / den * (p("110", "100") + p("101", "010") * (p("010", "100") - p("110", "100"))) /
                    p("000", "001");
  const double c2 = tail / den * (p("101", "011") - p("010", "100") * (p("001", "010") - p("101", "010"))) /
                    p("111", "110");

  const Alphabet binary(2);
  // Loose tolerance: these are literal ratios whose rows sum to 1 only algebraically.
  constexpr double tol = 1e-9;
  auto order2 = make_tensor(2, {k2_00_0, k2_00_1, k2_01_0, k2_01_1, k2_10_0, k2_10_1, k2_11_0, k2_11_1}, binary, tol);
  auto order1 = make_tensor(1, {c1 / (1 + c1), 1 / (1 + c1), 1 / (1 + c2), c2 / (1 + c2)}, binary, tol);
  auto order0 = make_tensor(0, {1 / (1 + (1 + c2) / (1 + c1)), 1 / (1 + (1 + c1) / (1 + c2))}, binary, tol);
  return {std::move(order2), std::move(order1), std::move(order0), c1, c2};
}

}  // namespace ergodikit
