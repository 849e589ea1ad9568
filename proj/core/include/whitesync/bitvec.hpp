#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whitesync {

// Packed 0/1 indicator vector with word-level popcount. Channel ids are
// 0-based. Bits past size() in the last word are kept zero so callers may
// AND whole words together.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  static BitVector from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        v.set(i);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("BitVector: expected '0' or '1', got '" +
                                    std::string(1, bits[i]) + "'");
      }
    }
    return v;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  /// Number of set bits.
  std::size_t count() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
  }

  /// Number of set bits strictly before position i.
  std::size_t count_prefix(std::size_t i) const {
    std::size_t total = 0;
    const std::size_t full = i >> 6;
    for (std::size_t w = 0; w < full; ++w) total += std::popcount(words_[w]);
    const std::size_t rem = i & 63;
    if (rem != 0) {
      total += std::popcount(words_[full] & ((std::uint64_t{1} << rem) - 1));
    }
    return total;
  }

  std::size_t word_count() const { return words_.size(); }
  std::uint64_t word(std::size_t w) const { return words_[w]; }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) out[i] = '1';
    }
    return out;
  }

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace whitesync
