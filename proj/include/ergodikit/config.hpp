#pragma once

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergodikit/errors.hpp"

namespace ergodikit {

/// A parsed value of the key/value config language (a TOML subset:
/// sections, integers, floats, booleans, strings, one-line arrays).
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<std::int64_t, double, bool, std::string, Array> data;
  int line = 0;
  int column = 0;
};

/// Flat table from "section.key" to value, with source positions kept for
/// error messages.
class ConfigDocument {
 public:
  ConfigDocument() = default;
  explicit ConfigDocument(std::string source) : source_(std::move(source)) {}

  const std::string& source() const noexcept { return source_; }
  const std::map<std::string, ConfigValue>& entries() const noexcept { return entries_; }

  bool contains(const std::string& path) const { return entries_.count(path) > 0; }
  const ConfigValue* find(const std::string& path) const {
    const auto it = entries_.find(path);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void insert(std::string path, ConfigValue value, int line, int column) {
    if (entries_.count(path)) {
      throw ValidationError(location(line, column) + ": duplicate key '" + path + "'");
    }
    entries_.emplace(std::move(path), std::move(value));
  }

  std::string location(int line, int column) const {
    return source_ + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
  std::string location(const ConfigValue& v) const { return location(v.line, v.column); }

 private:
  std::string source_ = "<config>";
  std::map<std::string, ConfigValue> entries_;
};

namespace detail {

class ConfigParser {
 public:
  ConfigParser(const std::string& text, ConfigDocument& doc) : text_(text), doc_(doc) {}

  void parse() {
    std::string section;
    while (pos_ < text_.size()) {
      skip_blank();
      if (at_end_of_line()) {
        next_line();
        continue;
      }
      if (peek() == '[') {
        advance();
        skip_blank();
        const int col = column();
        std::string name = identifier();
        if (name.empty()) fail(col, "expected a section name");
        skip_blank();
        expect(']');
        section = std::move(name);
      } else {
        const int line = line_;
        const int col = column();
        std::string key = identifier();
        if (key.empty()) fail(col, "expected a key or [section]");
        skip_blank();
        expect('=');
        skip_blank();
        ConfigValue value = parse_value();
        doc_.insert(section.empty() ? key : section + "." + key, std::move(value), line, col);
      }
      skip_blank();
      if (!at_end_of_line()) fail(column(), std::string("unexpected character '") + peek() + "'");
      next_line();
    }
  }

 private:
  [[noreturn]] void fail(int col, const std::string& msg) const {
    throw ValidationError(doc_.location(line_, col) + ": " + msg);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\n'; }
  void advance() { ++pos_; }
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  bool at_end_of_line() const { return pos_ >= text_.size() || peek() == '\n' || peek() == '#'; }

  void next_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    if (pos_ < text_.size()) {
      ++pos_;
      ++line_;
      line_start_ = pos_;
    }
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(column(), std::string("expected '") + c + "'");
    advance();
  }

  std::string identifier() {
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        out.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    return out;
  }

  ConfigValue parse_value() {
    ConfigValue v;
    v.line = line_;
    v.column = column();
    const char c = peek();
    if (c == '"') {
      v.data = parse_string();
    } else if (c == '[') {
      advance();
      ConfigValue::Array items;
      skip_blank();
      if (peek() == ']') {
        advance();
      } else {
        for (;;) {
          skip_blank();
          items.push_back(parse_value());
          skip_blank();
          if (peek() == ',') {
            advance();
            skip_blank();
            if (peek() == ']') {
              advance();
              break;
            }
            continue;
          }
          if (peek() == ']') {
            advance();
            break;
          }
          fail(column(), "expected ',' or ']' in array");
        }
      }
      v.data = std::move(items);
    } else {
      std::string token;
      while (pos_ < text_.size()) {
        const char t = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(t)) || t == '+' || t == '-' || t == '.' || t == '_') {
          token.push_back(t);
          ++pos_;
        } else {
          break;
        }
      }
      if (token.empty()) fail(v.column, "expected a value");
      if (token == "true" || token == "false") {
        v.data = token == "true";
      } else {
        std::string digits;
        for (char t : token) {
          if (t != '_') digits.push_back(t);
        }
        char* end = nullptr;
        const bool integral = digits.find_first_of(".eEin") == std::string::npos;
        if (integral) {
          errno = 0;
          const long long iv = std::strtoll(digits.c_str(), &end, 10);
          if (end != digits.c_str() + digits.size() || errno != 0) fail(v.column, "malformed integer '" + token + "'");
          v.data = static_cast<std::int64_t>(iv);
        } else {
          const double dv = std::strtod(digits.c_str(), &end);
          if (end != digits.c_str() + digits.size()) fail(v.column, "malformed number '" + token + "'");
          v.data = dv;
        }
      }
    }
    return v;
  }

  std::string parse_string() {
    const int start = column();
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size() || peek() == '\n') fail(start, "unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail(start, "unterminated string");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(column() - 1, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  const std::string& text_;
  ConfigDocument& doc_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

}  // namespace detail

inline ConfigDocument parse_config(const std::string& text, const std::string& source = "<config>") {
  ConfigDocument doc(source);
  detail::ConfigParser(text, doc).parse();
  return doc;
}

/// Everything a CLI run needs. Field paths in error messages follow the
/// config layout, e.g. "prior.alpha".
struct RunConfig {
  std::size_t alphabet = 2;
  std::size_t nmax = 8;
  /// Order prior weights beta(0..nmax); empty means beta_mass on every order.
  std::vector<double> beta;
  double beta_mass = 1.0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::optional<std::size_t> order;
  std::optional<std::string> tensor_path;
  std::vector<std::size_t> grid;
  std::size_t depth = 6;
  std::string out_dir = ".";
  std::size_t svg_width = 720;
  std::size_t svg_height = 420;

  std::vector<double> beta_weights() const {
    return beta.empty() ? std::vector<double>(nmax + 1, beta_mass) : beta;
  }

  void validate() const {
    if (alphabet < 2) throw ValidationError("model.alphabet: must be at least 2");
    if (nmax > 32) throw ValidationError("model.nmax: must be at most 32");
    if (!beta.empty() && beta.size() != nmax + 1) {
      throw ValidationError("prior.beta: expected " + std::to_string(nmax + 1) + " weights (orders 0..nmax), got " +
                            std::to_string(beta.size()));
    }
    double mass = 0.0;
    for (double b : beta) {
      if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("prior.beta: weights must be finite and >= 0");
      mass += b;
    }
    if (!beta.empty() && !(mass > 0.0)) throw ValidationError("prior.beta: total mass must be positive");
    if (beta.empty() && (!(beta_mass > 0.0) || !std::isfinite(beta_mass))) {
      throw ValidationError("prior.beta: mass per order must be positive");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("prior.alpha: must be positive");
    if (n < 1) throw ValidationError("simulate.n: must be at least 1");
    if (tensor_path && !std::filesystem::exists(*tensor_path)) {
      throw ValidationError("simulate.tensor: file '" + *tensor_path + "' does not exist");
    }
    for (std::size_t m : grid) {
      if (m < 1) throw ValidationError("sweep.grid: grid points must be at least 1");
    }
    if (svg_width < 100 || svg_height < 100) throw ValidationError("report: width and height must be >= 100");
  }

  /// Stable text of every setting that influences command output; output
  /// locations are excluded so reruns into another directory match.
  std::string canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "alphabet=" << alphabet << ";nmax=" << nmax << ";beta=";
    for (double b : beta_weights()) out << b << ',';
    out << ";alpha=" << alpha << ";seed=" << seed << ";n=" << n << ";order=";
    if (order) out << *order;
    out << ";tensor=" << tensor_path.value_or("") << ";grid=";
    for (auto m : grid) out << m << ',';
    out << ";depth=" << depth << ";svg=" << svg_width << 'x' << svg_height;
    return out.str();
  }

  /// FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

namespace detail {

inline std::int64_t config_int(const ConfigDocument& doc, const std::string& path, const ConfigValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return *i;
  throw ValidationError(path + ": expected an integer (" + doc.location(v) + ")");
}

inline std::size_t config_size(const ConfigDocument& doc, const std::string& path, const ConfigValue& v) {
  const auto i = config_int(doc, path, v);
  if (i < 0) throw ValidationError(path + ": must be nonnegative (" + doc.location(v) + ")");
  return static_cast<std::size_t>(i);
}

inline double config_double(const ConfigDocument& doc, const std::string& path, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
  throw ValidationError(path + ": expected a number (" + doc.location(v) + ")");
}

inline std::string config_string(const ConfigDocument& doc, const std::string& path, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  throw ValidationError(path + ": expected a string (" + doc.location(v) + ")");
}

inline const ConfigValue::Array& config_array(const ConfigDocument& doc, const std::string& path,
                                              const ConfigValue& v) {
  if (const auto* a = std::get_if<ConfigValue::Array>(&v.data)) return *a;
  throw ValidationError(path + ": expected an array (" + doc.location(v) + ")");
}

}  // namespace detail

/// Builds a RunConfig from a parsed document; unknown keys are rejected.
inline RunConfig run_config_from(const ConfigDocument& doc) {
  using namespace detail;
  RunConfig cfg;
  for (const auto& [path, v] : doc.entries()) {
    if (path == "model.alphabet") {
      cfg.alphabet = config_size(doc, path, v);
    } else if (path == "model.nmax") {
      cfg.nmax = config_size(doc, path, v);
    } else if (path == "prior.beta") {
      if (std::holds_alternative<ConfigValue::Array>(v.data)) {
        cfg.beta.clear();
        for (const auto& item : config_array(doc, path, v)) cfg.beta.push_back(config_double(doc, path, item));
      } else {
        cfg.beta.clear();
        cfg.beta_mass = config_double(doc, path, v);
      }
    } else if (path == "prior.alpha") {
      cfg.alpha = config_double(doc, path, v);
    } else if (path == "run.seed") {
      cfg.seed = static_cast<std::uint64_t>(config_size(doc, path, v));
    } else if (path == "run.out") {
      cfg.out_dir = config_string(doc, path, v);
    } else if (path == "simulate.n") {
      cfg.n = config_size(doc, path, v);
    } else if (path == "simulate.order") {
      cfg.order = config_size(doc, path, v);
    } else if (path == "simulate.tensor") {
      cfg.tensor_path = config_string(doc, path, v);
    } else if (path == "sweep.grid") {
      cfg.grid.clear();
      for (const auto& item : config_array(doc, path, v)) cfg.grid.push_back(config_size(doc, path, item));
    } else if (path == "check.depth") {
      cfg.depth = config_size(doc, path, v);
    } else if (path == "report.width") {
      cfg.svg_width = config_size(doc, path, v);
    } else if (path == "report.height") {
      cfg.svg_height = config_size(doc, path, v);
    } else {
      throw ValidationError(doc.location(v) + ": unknown key '" + path + "'");
    }
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return run_config_from(parse_config(buf.str(), path));
}

}  // namespace ergodikit
