#include "ergolab/level_bits.hpp"

#include <algorithm>
#include <cassert>

namespace ergolab {

bool LevelBits::empty_set() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

std::uint64_t LevelBits::first() const noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) return w * kWordBits + static_cast<std::uint64_t>(std::countr_zero(words_[w]));
  }
  return size_;
}

void LevelBits::set_range(std::uint64_t lo, std::uint64_t hi) noexcept {
  hi = std::min(hi, size_);
  if (lo >= hi) return;
  std::size_t first = lo / kWordBits;
  std::size_t last = (hi - 1) / kWordBits;
  Word first_mask = ~Word{0} << (lo % kWordBits);
  Word last_mask = ~Word{0} >> (kWordBits - 1 - (hi - 1) % kWordBits);
  if (first == last) {
    words_[first] |= first_mask & last_mask;
    return;
  }
  words_[first] |= first_mask;
  for (std::size_t w = first + 1; w < last; ++w) words_[w] = ~Word{0};
  words_[last] |= last_mask;
}

std::uint64_t LevelBits::count() const noexcept {
  std::uint64_t total = 0;
  for (Word w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

void LevelBits::trim() noexcept {
  if (size_ % kWordBits != 0 && !words_.empty()) words_.back() &= ~Word{0} >> (kWordBits - size_ % kWordBits);
}

void LevelBits::or_shifted(const LevelBits& other, std::int64_t offset) noexcept {
  const std::size_t n = words_.size();
  const std::size_t m = other.words_.size();
  if (offset >= 0) {
    const auto uoff = static_cast<std::uint64_t>(offset);
    const std::size_t word_shift = uoff / kWordBits;
    const unsigned bit_shift = uoff % kWordBits;
    for (std::size_t j = 0; j < m && j + word_shift < n; ++j) {
      const Word w = other.words_[j];
      if (w == 0) continue;
      if (bit_shift == 0) {
        words_[j + word_shift] |= w;
      } else {
        words_[j + word_shift] |= w << bit_shift;
        if (j + word_shift + 1 < n) words_[j + word_shift + 1] |= w >> (kWordBits - bit_shift);
      }
    }
  } else {
    const auto uoff = static_cast<std::uint64_t>(-offset);
    const std::size_t word_shift = uoff / kWordBits;
    const unsigned bit_shift = uoff % kWordBits;
    for (std::size_t j = word_shift; j < m; ++j) {
      const Word w = other.words_[j];
      if (w == 0) continue;
      const std::size_t dst = j - word_shift;
      if (bit_shift == 0) {
        if (dst < n) words_[dst] |= w;
      } else {
        if (dst < n) words_[dst] |= w >> bit_shift;
        if (dst >= 1 && dst - 1 < n) words_[dst - 1] |= w << (kWordBits - bit_shift);
      }
    }
  }
  trim();
}

LevelBits LevelBits::shifted(std::int64_t k) const {
  LevelBits out(size_);
  out.or_shifted(*this, k);
  return out;
}

LevelBits& LevelBits::operator&=(const LevelBits& other) noexcept {
  assert(other.size_ == size_);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

LevelBits& LevelBits::operator|=(const LevelBits& other) noexcept {
  assert(other.size_ == size_);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

LevelBits& LevelBits::operator^=(const LevelBits& other) noexcept {
  assert(other.size_ == size_);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

LevelBits& LevelBits::and_not(const LevelBits& other) noexcept {
  assert(other.size_ == size_);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
  return *this;
}

std::vector<std::uint64_t> LevelBits::indices() const {
  std::vector<std::uint64_t> out;
  out.reserve(count());
  for_each([&](std::uint64_t i) { out.push_back(i); });
  return out;
}

std::uint64_t count_and(const LevelBits& a, const LevelBits& b) noexcept {
  assert(a.size() == b.size());
  std::uint64_t total = 0;
  const auto* x = a.words();
  const auto* y = b.words();
  for (std::size_t w = 0; w < a.word_size(); ++w) total += static_cast<std::uint64_t>(std::popcount(x[w] & y[w]));
  return total;
}

}  // namespace ergolab
