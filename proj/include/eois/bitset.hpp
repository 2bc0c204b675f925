#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "eois/simd/bitops.hpp"

namespace eois {

/// Fixed-size bitset over example indices; bulk operations go through the
/// dispatched SIMD kernels.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t bits, bool value = false)
      : bits_(bits), words_((bits + 63) / 64, value ? ~simd::Word{0} : simd::Word{0}) {
    if (value) trim();
  }

  std::size_t size() const { return bits_; }
  std::size_t word_count() const { return words_.size(); }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= simd::Word{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(simd::Word{1} << (i & 63)); }

  std::size_t count() const { return simd::popcount(words_); }
  bool any() const { return simd::any(words_); }
  std::size_t and_count(const Bitset& other) const { return simd::and_popcount(words_, other.words_); }

  /// *this = a & b, returns the resulting popcount.
  std::size_t assign_and(const Bitset& a, const Bitset& b) {
    bits_ = a.bits_;
    words_.resize(a.words_.size());
    return simd::and_into(words_, a.words_, b.words_);
  }

  Bitset& operator&=(const Bitset& other) {
    simd::and_into(words_, words_, other.words_);
    return *this;
  }

  /// Clears every bit set in `other`.
  Bitset& subtract(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
  }

  template <class F>
  void for_each_set(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      simd::Word word = words_[w];
      while (word) {
        const int bit = __builtin_ctzll(word);
        f(w * 64 + static_cast<std::size_t>(bit));
        word &= word - 1;
      }
    }
  }

  const std::vector<simd::Word>& words() const { return words_; }
  bool operator==(const Bitset&) const = default;

 private:
  void trim() {
    if (bits_ % 64 != 0 && !words_.empty()) words_.back() &= (simd::Word{1} << (bits_ % 64)) - 1;
  }

  std::size_t bits_ = 0;
  std::vector<simd::Word> words_;
};

}  // namespace eois
