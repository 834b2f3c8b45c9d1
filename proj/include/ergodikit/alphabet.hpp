#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ergodikit/errors.hpp"

namespace ergodikit {

using Symbol = std::uint32_t;
/// Big-endian radix-s code of a word; the first symbol is most significant.
using WordCode = std::uint64_t;

/// The finite state space {0, ..., s-1}.
class Alphabet {
 public:
  explicit Alphabet(std::size_t size) : size_(size) {
    if (size < 2) {
      throw ValidationError("alphabet size must be at least 2, got " + std::to_string(size));
    }
    if (size > std::numeric_limits<Symbol>::max()) {
      throw ValidationError("alphabet size too large");
    }
  }

  std::size_t size() const noexcept { return size_; }
  bool contains(Symbol x) const noexcept { return x < size_; }

  /// s^length. Throws when the count does not fit a WordCode.
  WordCode word_count(std::size_t length) const {
    WordCode count = 1;
    for (std::size_t i = 0; i < length; ++i) {
      if (count > std::numeric_limits<WordCode>::max() / size_) {
        throw ValidationError("s^" + std::to_string(length) + " overflows the word encoding");
      }
      count *= size_;
    }
    return count;
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::size_t size_;
};

inline WordCode encode_context(std::span<const Symbol> word, const Alphabet& alphabet) {
  const auto s = static_cast<WordCode>(alphabet.size());
  WordCode code = 0;
  for (Symbol x : word) {
    if (!alphabet.contains(x)) {
      throw ValidationError("symbol " + std::to_string(x) + " out of range for alphabet of size " +
                            std::to_string(alphabet.size()));
    }
    code = code * s + x;
  }
  return code;
}

inline std::vector<Symbol> decode_context(WordCode code, std::size_t length, const Alphabet& alphabet) {
  if (code >= alphabet.word_count(length)) {
    throw ValidationError("code " + std::to_string(code) + " exceeds s^" + std::to_string(length));
  }
  const auto s = static_cast<WordCode>(alphabet.size());
  std::vector<Symbol> word(length);
  for (std::size_t i = length; i-- > 0;) {
    word[i] = static_cast<Symbol>(code % s);
    code /= s;
  }
  return word;
}

/// Digit rendering used by the CSV exports; comma-separated beyond base 10.
inline std::string word_to_string(std::span<const Symbol> word, const Alphabet& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (alphabet.size() <= 10) {
      out.push_back(static_cast<char>('0' + word[i]));
    } else {
      if (i > 0) out.push_back(',');
      out += std::to_string(word[i]);
    }
  }
  return out;
}

}  // namespace ergodikit
