#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>

#include "reparse/space.hpp"

namespace reparse {

// Fixed-width bitset. Used for TNFA state-sets and for position sets over a
// string; the category decides which ledger bucket pays for it.
class StateSet {
 public:
  StateSet() : words_(TrackingAllocator<std::uint64_t>(Category::state_sets)) {}
  explicit StateSet(std::size_t width, Category c = Category::state_sets)
      : width_(width), words_((width + 63) / 64, 0, TrackingAllocator<std::uint64_t>(c)) {}

  std::size_t width() const { return width_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  // Sets bit i and reports whether it was previously clear.
  bool insert(std::size_t i) {
    auto& w = words_[i >> 6];
    auto mask = std::uint64_t{1} << (i & 63);
    if (w & mask) return false;
    w |= mask;
    return true;
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  bool any() const {
    for (auto w : words_)
      if (w != 0) return true;
    return false;
  }
  bool none() const { return !any(); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  StateSet& operator|=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  StateSet& operator&=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  friend bool operator==(const StateSet& a, const StateSet& b) {
    return a.width_ == b.width_ &&
           std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
  }

  // Lowest set bit, or width() when empty.
  std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] != 0) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
    return width_;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto w = words_[i];
      while (w != 0) {
        f(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  const tracked_vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t width_ = 0;
  tracked_vector<std::uint64_t> words_;
};

}  // namespace reparse
