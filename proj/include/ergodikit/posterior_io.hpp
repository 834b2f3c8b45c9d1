#pragma once

#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergodikit/errors.hpp"
#include "ergodikit/io.hpp"
#include "ergodikit/posterior.hpp"

namespace ergodikit {

inline constexpr const char* kPosteriorFormat = "ergodikit-posterior/1";

inline nlohmann::ordered_json posterior_to_json(const PosteriorState& state, const std::string& config_hash) {
  nlohmann::ordered_json doc;
  doc["format"] = kPosteriorFormat;
  doc["config_hash"] = config_hash;
  doc["alphabet_size"] = state.alphabet.size();
  doc["n"] = state.n;
  doc["order_posterior"] = state.order_posterior.normalized();
  auto& orders = doc["orders"] = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n <= state.max_order(); ++n) {
    const auto& summary = state.data_summary[n];
    const auto& prior = state.tensor_posteriors[n];
    nlohmann::ordered_json entry;
    entry["order"] = n;
    entry["windows"] = summary.windows;
    if (summary.defect.total.is_zero()) {
      entry["log_defect"] = nullptr;
    } else {
      entry["log_defect"] = summary.defect.total.log();
    }
    auto& alphas = entry["alphas"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < prior.context_count(); ++c) {
      const auto row = prior.row(c);
      alphas.push_back(std::vector<double>(row.begin(), row.end()));
    }
    auto& transitions = entry["transitions"] = nlohmann::ordered_json::array();
    if (summary.transitions) {
      for (const auto& [word, count] : summary.transitions->entries()) {
        transitions.push_back({word, count});
      }
    }
    orders.push_back(std::move(entry));
  }
  return doc;
}

inline void write_posterior(std::ostream& out, const PosteriorState& state, const std::string& config_hash) {
  out << posterior_to_json(state, config_hash).dump(2) << '\n';
  if (!out) throw IoError("failed writing posterior");
}

inline PosteriorState read_posterior(std::istream& in, const std::string& where = "posterior") {
  const auto doc = parse_json(in, where);
  if (detail::require(doc, "format", where) != kPosteriorFormat) {
    throw ValidationError(where + ": unsupported format tag");
  }
  const Alphabet alphabet(detail::require_size(doc, "alphabet_size", where));
  const std::size_t n = detail::require_size(doc, "n", where);
  const auto weights = detail::require(doc, "order_posterior", where).get<std::vector<double>>();
  const auto& orders = detail::require(doc, "orders", where);
  if (!orders.is_array() || orders.size() != weights.size()) {
    throw ValidationError(where + ".orders: expected one entry per order");
  }
  std::vector<DirichletTensorPrior> tensors;
  std::vector<OrderSummary> summary;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const auto& e = orders[k];
    const std::string at = where + ".orders[" + std::to_string(k) + "]";
    std::vector<double> alphas;
    for (const auto& row : detail::require(e, "alphas", at)) {
      for (const auto& a : row) alphas.push_back(a.get<double>());
    }
    tensors.emplace_back(alphabet, k, std::move(alphas));
    OrderSummary o;
    o.order = k;
    o.windows = detail::require_size(e, "windows", at);
    const auto& d = detail::require(e, "log_defect", at);
    o.defect = {k, d.is_null() ? LogValue::zero() : LogValue::from_log(d.get<double>())};
    if (o.windows > 0) {
      std::vector<GramTable::Entry> entries;
      for (const auto& t : detail::require(e, "transitions", at)) {
        entries.emplace_back(t.at(0).get<WordCode>(), t.at(1).get<Count>());
      }
      o.transitions = GramTable(alphabet, k + 1, o.windows, std::move(entries));
    }
    summary.push_back(std::move(o));
  }
  return PosteriorState{alphabet, n, OrderDistribution(weights), std::move(tensors), std::move(summary)};
}

}  // namespace ergodikit
