#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergodikit/config.hpp"
#include "ergodikit/empirical.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/io.hpp"
#include "ergodikit/parallel.hpp"
#include "ergodikit/posterior.hpp"
#include "ergodikit/posterior_io.hpp"
#include "ergodikit/process_measure.hpp"
#include "ergodikit/projection.hpp"
#include "ergodikit/sampler.hpp"
#include "ergodikit/svg.hpp"
#include "ergodikit/trajectory.hpp"

namespace ergodikit::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

/// Residual above which cmd_check reports a stationarity failure.
inline constexpr double kCheckThreshold = 1e-8;

/// Contexts printed per order in report.txt.
inline constexpr std::size_t kReportContexts = 16;

/// Runs a command body and maps library errors onto exit codes.
inline int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIo;
  }
}

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  return dir;
}

inline Trajectory load_trajectory(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  return read_trajectory(in, cfg.alphabet);
}

inline std::vector<DirichletTensorPrior> uniform_tensor_priors(const RunConfig& cfg) {
  std::vector<DirichletTensorPrior> priors;
  const Alphabet alphabet(cfg.alphabet);
  for (std::size_t n = 0; n <= cfg.nmax; ++n) priors.push_back(DirichletTensorPrior::uniform(alphabet, n, cfg.alpha));
  return priors;
}

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace detail

/// Draws (order, tensor, trajectory) per the three-stage scheme, or uses a
/// fixed order/tensor from the config. Writes trajectory.txt and model.json.
inline int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Alphabet alphabet(cfg.alphabet);
  const auto dir = detail::output_dir(cfg);

  CounterRng order_rng(cfg.seed, 1);
  CounterRng tensor_rng(cfg.seed, 2);
  CounterRng path_rng(cfg.seed, 3);

  std::optional<StochasticTensor> fixed_tensor;
  if (cfg.tensor_path) {
    auto in = open_input(*cfg.tensor_path);
    fixed_tensor = read_tensor(in, *cfg.tensor_path);
    if (!(fixed_tensor->alphabet() == alphabet)) {
      throw ValidationError("simulate.tensor: alphabet size differs from model.alphabet");
    }
    if (cfg.order && *cfg.order != fixed_tensor->order()) {
      throw ValidationError("simulate.order: conflicts with the order of simulate.tensor");
    }
  }

  bool sampled_order = false;
  std::size_t order = 0;
  if (fixed_tensor) {
    order = fixed_tensor->order();
  } else if (cfg.order) {
    order = *cfg.order;
  } else {
    order = sample_order(OrderDistribution(cfg.beta_weights()), order_rng);
    sampled_order = true;
  }

  const StochasticTensor tensor =
      fixed_tensor ? *fixed_tensor : sample_tensor(DirichletTensorPrior::uniform(alphabet, order, cfg.alpha), tensor_rng);
  const KernelSequence seq = kernel_sequence(tensor);
  const Trajectory x = sample_trajectory(seq, cfg.n, path_rng);

  const std::string hash = cfg.hash();
  {
    auto out = open_output((dir / "trajectory.txt").string());
    const std::vector<std::string> comments{"config=" + hash};
    write_trajectory(out, x, comments);
  }
  {
    auto out = open_output((dir / "model.json").string());
    out << "{\n"
        << "  \"format\": \"ergodikit-model/1\",\n"
        << "  \"config_hash\": \"" << hash << "\",\n"
        << "  \"seed\": " << cfg.seed << ",\n"
        << "  \"order\": " << order << ",\n"
        << "  \"order_sampled\": " << (sampled_order ? "true" : "false") << ",\n"
        << "  \"n\": " << cfg.n << ",\n"
        << "  \"tensor\":\n";
    write_tensor(out, tensor, "  ");
    out << ",\n  \"kernel_sequence\":\n";
    write_kernel_sequence(out, seq, "  ");
    out << "\n}\n";
    if (!out) throw IoError("failed writing model.json");
  }
  log << "simulated n=" << cfg.n << " order=" << order << (sampled_order ? " (sampled)" : "") << " -> "
      << (dir / "trajectory.txt").string() << '\n';
  return kSuccess;
}

/// Posterior for a trajectory file: posterior.json plus report.txt.
inline int cmd_infer(const RunConfig& cfg, const std::string& input, std::ostream& log) {
  cfg.validate();
  const Trajectory x = detail::load_trajectory(input, cfg);
  const auto dir = detail::output_dir(cfg);
  const OrderDistribution beta(cfg.beta_weights());
  const auto priors = detail::uniform_tensor_priors(cfg);
  const PosteriorState state = full_posterior(beta, priors, x);
  const std::string hash = cfg.hash();

  {
    auto out = open_output((dir / "posterior.json").string());
    write_posterior(out, state, hash);
  }

  std::ostringstream report;
  report << "# config_hash=" << hash << '\n'
         << "n = " << state.n << ", alphabet = " << state.alphabet.size() << ", nmax = " << state.max_order()
         << "\n\n"
         << "order  posterior             log10 D_n\n";
  const auto nu = state.order_posterior.normalized();
  for (std::size_t n = 0; n <= state.max_order(); ++n) {
    const auto& d = state.data_summary[n].defect.total;
    report << (n < 10 ? " " : "") << n << "     " << detail::fixed(nu[n], 17) << "   "
           << (d.is_zero() ? std::string("zero") : detail::fixed(d.log() / std::log(10.0), 4));
    if (state.data_summary[n].windows == 0) report << "   (no windows: n <= N)";
    report << '\n';
  }
  report << "\nmodal order: " << state.modal_order() << '\n';
  for (std::size_t n = 0; n <= state.max_order(); ++n) {
    const auto mean = state.tensor_posteriors[n].mean();
    report << "\nposterior-mean tensor, order " << n << ":\n";
    const std::size_t shown = std::min<std::size_t>(mean.context_count(), kReportContexts);
    for (WordCode c = 0; c < shown; ++c) {
      const auto ctx = decode_context(c, n, state.alphabet);
      report << "  [" << (n == 0 ? std::string("-") : word_to_string(ctx, state.alphabet)) << "]";
      for (double p : mean.row(c)) report << ' ' << detail::fixed(p, 6);
      report << '\n';
    }
    if (shown < mean.context_count()) report << "  ... " << mean.context_count() - shown << " more contexts\n";
  }

  {
    auto out = open_output((dir / "report.txt").string());
    out << report.str();
    if (!out) throw IoError("failed writing report.txt");
  }
  log << report.str();
  return kSuccess;
}

/// One row per (m, order) of the order posterior given X_1..X_m.
struct SweepPoint {
  std::size_t m = 0;
  std::vector<double> masses;
};

inline std::vector<SweepPoint> order_posterior_sweep(const Trajectory& x, const OrderDistribution& beta,
                                                     std::span<const std::size_t> grid) {
  for (std::size_t m : grid) {
    if (m < 1 || m > x.size()) {
      throw ValidationError("sweep.grid: point " + std::to_string(m) + " outside 1.." + std::to_string(x.size()));
    }
  }
  std::vector<SweepPoint> points(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    const auto prefix = x.prefix(grid[g]);
    points[g] = {grid[g], update_order(beta, prefix).normalized()};
  });
  return points;
}

/// Order-posterior curves nu(N | X_1..X_m) on a grid: sweep.csv, sweep.svg.
inline int cmd_sweep(const RunConfig& cfg, const std::string& input, std::ostream& log) {
  cfg.validate();
  if (cfg.grid.empty()) throw ValidationError("sweep.grid: no grid points given");
  const Trajectory x = detail::load_trajectory(input, cfg);
  const auto dir = detail::output_dir(cfg);
  const OrderDistribution beta(cfg.beta_weights());
  const auto points = order_posterior_sweep(x, beta, cfg.grid);
  const std::string hash = cfg.hash();

  {
    auto out = open_output((dir / "sweep.csv").string());
    out << "# config_hash=" << hash << '\n' << "m,order,mass\n";
    for (const auto& p : points) {
      for (std::size_t n = 0; n < p.masses.size(); ++n) out << p.m << ',' << n << ',' << format_double(p.masses[n]) << '\n';
    }
    if (!out) throw IoError("failed writing sweep.csv");
  }
  {
    std::vector<SvgSeries> series(beta.max_order() + 1);
    for (std::size_t n = 0; n < series.size(); ++n) {
      series[n].label = "order " + std::to_string(n);
      for (const auto& p : points) series[n].points.emplace_back(static_cast<double>(p.m), p.masses[n]);
    }
    SvgPlotOptions opt;
    opt.width = cfg.svg_width;
    opt.height = cfg.svg_height;
    opt.title = "order posterior vs sample size";
    opt.x_label = "m (log scale)";
    opt.y_label = "posterior mass";
    opt.log_x = true;
    opt.comment = "config_hash=" + hash;
    auto out = open_output((dir / "sweep.svg").string());
    render_svg(out, series, opt);
    if (!out) throw IoError("failed writing sweep.svg");
  }
  log << "swept " << points.size() << " grid points -> " << (dir / "sweep.csv").string() << '\n';
  return kSuccess;
}

/// psi_{M,N} applied to a tensor file.
inline int cmd_project(const std::string& tensor_path, std::size_t target_order, const std::string& out_path,
                       std::ostream& log) {
  auto in = open_input(tensor_path);
  const StochasticTensor tensor = read_tensor(in, tensor_path);
  const StochasticTensor projected = project_chain(tensor, target_order);
  auto out = open_output(out_path);
  out << tensor_to_string(projected);
  if (!out) throw IoError("failed writing '" + out_path + "'");
  log << "projected order " << tensor.order() << " -> " << target_order << ": " << out_path << '\n';
  return kSuccess;
}

/// Loads a tensor (expanded to its kernel chain), a kernel sequence, or a
/// simulate model file.
inline KernelSequence load_sequence_like(const std::string& path) {
  auto in = open_input(path);
  const auto doc = parse_json(in, path);
  if (doc.contains("kernel_sequence")) {
    return kernel_sequence_from_json(doc.at("kernel_sequence"), SequenceCheck::structure_only, path);
  }
  if (doc.contains("kernels")) return kernel_sequence_from_json(doc, SequenceCheck::structure_only, path);
  return kernel_sequence(tensor_from_json(doc, path));
}

/// Stationarity check; exit status 2 when the residual exceeds 1e-8.
inline int cmd_check(const std::string& path, std::size_t depth, std::ostream& log) {
  const KernelSequence seq = load_sequence_like(path);
  const auto report = stationarity_residual(seq, depth);
  const bool ok = report.max_residual <= kCheckThreshold;
  log << "top order: " << seq.top_order() << "\n"
      << "depth: " << depth << "\n"
      << "max residual: " << format_double(report.max_residual) << "\n"
      << "worst word: "
      << (report.worst_word.empty() ? std::string("-") : word_to_string(report.worst_word, seq.alphabet())) << "\n"
      << "status: " << (ok ? "stationary" : "NOT stationary") << '\n';
  return ok ? kSuccess : kValidation;
}

}  // namespace ergodikit::cli
