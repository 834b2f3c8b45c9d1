#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/projection.hpp"
#include "ergodikit/tensor.hpp"

namespace ergodikit {

/// 17 significant digits; parses back to the identical double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_rows(std::ostream& out, const StochasticTensor& tensor, const std::string& indent) {
  out << indent << "\"rows\": [";
  const std::size_t s = tensor.alphabet().size();
  for (WordCode c = 0; c < tensor.context_count(); ++c) {
    out << (c == 0 ? "\n" : ",\n") << indent << "  [";
    for (std::size_t j = 0; j < s; ++j) {
      if (j > 0) out << ", ";
      out << format_double(tensor(c, static_cast<Symbol>(j)));
    }
    out << ']';
  }
  out << '\n' << indent << ']';
}

inline const nlohmann::json& require(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return doc.at(key);
}

inline std::size_t require_size(const nlohmann::json& doc, const char* key, const std::string& where) {
  const auto& v = require(doc, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError(where + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace detail

/// Tensor document {alphabet_size, order, rows} in encoded-context order.
inline void write_tensor(std::ostream& out, const StochasticTensor& tensor, const std::string& indent = "") {
  out << indent << "{\n"
      << indent << "  \"alphabet_size\": " << tensor.alphabet().size() << ",\n"
      << indent << "  \"order\": " << tensor.order() << ",\n";
  detail::write_rows(out, tensor, indent + "  ");
  out << '\n' << indent << '}';
}

inline std::string tensor_to_string(const StochasticTensor& tensor) {
  std::ostringstream out;
  write_tensor(out, tensor);
  out << '\n';
  return out.str();
}

inline StochasticTensor tensor_from_json(const nlohmann::json& doc, const std::string& where = "tensor") {
  const std::size_t s = detail::require_size(doc, "alphabet_size", where);
  const std::size_t order = detail::require_size(doc, "order", where);
  const auto& rows_json = detail::require(doc, "rows", where);
  if (!rows_json.is_array()) throw ValidationError(where + ".rows: expected an array");
  std::vector<std::vector<double>> rows;
  rows.reserve(rows_json.size());
  for (std::size_t c = 0; c < rows_json.size(); ++c) {
    const auto& r = rows_json[c];
    if (!r.is_array()) throw ValidationError(where + ".rows[" + std::to_string(c) + "]: expected an array");
    std::vector<double> row;
    for (const auto& p : r) {
      if (!p.is_number()) throw ValidationError(where + ".rows[" + std::to_string(c) + "]: expected numbers");
      row.push_back(p.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return make_tensor(order, rows, Alphabet(s));
}

inline nlohmann::json parse_json(std::istream& in, const std::string& where) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

inline StochasticTensor read_tensor(std::istream& in, const std::string& where = "tensor") {
  return tensor_from_json(parse_json(in, where), where);
}

/// Sequence document {alphabet_size, kernels: [tensor, ...]} ordered by order.
inline void write_kernel_sequence(std::ostream& out, const KernelSequence& seq, const std::string& indent = "") {
  out << indent << "{\n"
      << indent << "  \"alphabet_size\": " << seq.alphabet().size() << ",\n"
      << indent << "  \"kernels\": [";
  for (std::size_t m = 0; m <= seq.top_order(); ++m) {
    out << (m == 0 ? "\n" : ",\n");
    write_tensor(out, seq.kernel(m), indent + "    ");
  }
  out << '\n' << indent << "  ]\n" << indent << '}';
}

inline KernelSequence kernel_sequence_from_json(const nlohmann::json& doc, SequenceCheck check,
                                                const std::string& where = "sequence") {
  const auto& kernels_json = detail::require(doc, "kernels", where);
  if (!kernels_json.is_array()) throw ValidationError(where + ".kernels: expected an array");
  std::vector<StochasticTensor> kernels;
  for (std::size_t m = 0; m < kernels_json.size(); ++m) {
    kernels.push_back(tensor_from_json(kernels_json[m], where + ".kernels[" + std::to_string(m) + "]"));
  }
  return KernelSequence(std::move(kernels), check);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace ergodikit
