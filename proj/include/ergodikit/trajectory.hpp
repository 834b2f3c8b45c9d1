#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ergodikit/alphabet.hpp"
#include "ergodikit/errors.hpp"

namespace ergodikit {

/// Observed data X_1..X_n over an alphabet.
class Trajectory {
 public:
  Trajectory(Alphabet alphabet, std::vector<Symbol> symbols) : alphabet_(alphabet), symbols_(std::move(symbols)) {
    for (std::size_t k = 0; k < symbols_.size(); ++k) {
      if (!alphabet_.contains(symbols_[k])) {
        throw ValidationError("trajectory symbol " + std::to_string(symbols_[k]) + " at position " +
                              std::to_string(k + 1) + " is outside the alphabet");
      }
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  Symbol operator[](std::size_t k) const { return symbols_[k]; }

  /// X_1..X_m.
  Trajectory prefix(std::size_t m) const {
    if (m > symbols_.size()) throw ValidationError("prefix length exceeds trajectory length");
    return Trajectory(alphabet_, std::vector<Symbol>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(m)));
  }

 private:
  Alphabet alphabet_;
  std::vector<Symbol> symbols_;
};

/// Writes "#alphabet=s", optional comment lines, then the symbols on one
/// line: base-s digits for s <= 10, comma-separated integers otherwise.
inline void write_trajectory(std::ostream& out, const Trajectory& x, std::span<const std::string> comments = {}) {
  out << "#alphabet=" << x.alphabet().size() << '\n';
  for (const auto& c : comments) out << '#' << c << '\n';
  const bool digits = x.alphabet().size() <= 10;
  std::string body;
  body.reserve(x.size() * (digits ? 1 : 3));
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (digits) {
      body.push_back(static_cast<char>('0' + x[k]));
    } else {
      if (k > 0) body.push_back(',');
      body += std::to_string(x[k]);
    }
  }
  out << body;
  if (!out) throw IoError("failed writing trajectory");
}

/// Reads the trajectory format. Without a header the alphabet comes from
/// `expected_alphabet`, or failing that from the largest symbol seen.
inline Trajectory read_trajectory(std::istream& in, std::optional<std::size_t> expected_alphabet = std::nullopt) {
  std::optional<std::size_t> declared;
  std::string body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      constexpr std::string_view key = "#alphabet=";
      if (line.rfind(key, 0) == 0) {
        try {
          declared = std::stoul(line.substr(key.size()));
        } catch (const std::exception&) {
          throw ValidationError("malformed alphabet header: " + line);
        }
      }
      continue;
    }
    body += line;
  }
  if (in.bad()) throw IoError("failed reading trajectory");

  if (declared && expected_alphabet && *declared != *expected_alphabet) {
    throw ValidationError("alphabet mismatch: file declares " + std::to_string(*declared) + ", expected " +
                          std::to_string(*expected_alphabet));
  }

  std::vector<Symbol> symbols;
  const bool comma = body.find(',') != std::string::npos;
  if (comma) {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(item, &used);
      } catch (const std::exception&) {
        throw ValidationError("malformed trajectory symbol '" + item + "'");
      }
      for (std::size_t i = used; i < item.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(item[i]))) {
          throw ValidationError("malformed trajectory symbol '" + item + "'");
        }
      }
      symbols.push_back(static_cast<Symbol>(v));
    }
  } else {
    symbols.reserve(body.size());
    for (char ch : body) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      if (ch < '0' || ch > '9') throw ValidationError(std::string("malformed trajectory character '") + ch + "'");
      symbols.push_back(static_cast<Symbol>(ch - '0'));
    }
  }
  if (symbols.empty()) throw ValidationError("empty trajectory");

  std::size_t s = 0;
  if (declared) {
    s = *declared;
  } else if (expected_alphabet) {
    s = *expected_alphabet;
  } else {
    Symbol hi = 0;
    for (Symbol x : symbols) hi = std::max(hi, x);
    s = std::max<std::size_t>(2, static_cast<std::size_t>(hi) + 1);
  }
  return Trajectory(Alphabet(s), std::move(symbols));
}

}  // namespace ergodikit
