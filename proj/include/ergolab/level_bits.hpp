#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ergolab {

/// Fixed-size bitset over level indices [0, size). Bits past `size` in the
/// last word are always zero.
class LevelBits {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  LevelBits() = default;
  explicit LevelBits(std::uint64_t size) : size_(size), words_(word_count(size), 0) {}

  std::uint64_t size() const noexcept { return size_; }
  bool empty_set() const noexcept;

  bool test(std::uint64_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::uint64_t i) noexcept { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::uint64_t i) noexcept { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }

  /// Sets every bit in [lo, hi).
  void set_range(std::uint64_t lo, std::uint64_t hi) noexcept;
  void set_all() noexcept { set_range(0, size_); }

  std::uint64_t count() const noexcept;

  /// this |= (other shifted by `offset` towards higher indices); bits that
  /// land at or beyond size() are dropped. `other` may be shorter.
  void or_shifted(const LevelBits& other, std::int64_t offset) noexcept;

  /// Returns a same-size copy with bit i moved to i + k, truncated.
  LevelBits shifted(std::int64_t k) const;

  LevelBits& operator&=(const LevelBits& other) noexcept;
  LevelBits& operator|=(const LevelBits& other) noexcept;
  LevelBits& operator^=(const LevelBits& other) noexcept;
  /// this &= ~other
  LevelBits& and_not(const LevelBits& other) noexcept;

  friend bool operator==(const LevelBits&, const LevelBits&) = default;

  std::size_t word_size() const noexcept { return words_.size(); }
  const Word* words() const noexcept { return words_.data(); }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits != 0) {
        const int tz = std::countr_zero(bits);
        f(static_cast<std::uint64_t>(w * kWordBits + tz));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::uint64_t> indices() const;
  /// Lowest set bit, or size() when empty.
  std::uint64_t first() const noexcept;

 private:
  static std::size_t word_count(std::uint64_t bits) { return static_cast<std::size_t>((bits + kWordBits - 1) / kWordBits); }
  void trim() noexcept;

  std::uint64_t size_ = 0;
  std::vector<Word> words_;
};

/// popcount(a & b) without materializing the intersection.
std::uint64_t count_and(const LevelBits& a, const LevelBits& b) noexcept;

}  // namespace ergolab
