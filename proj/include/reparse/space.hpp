#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace reparse {

// Buckets for tracked bytes. Names are stable; they appear in bench output.
enum class Category : std::uint8_t {
  state_sets,
  match_sets,
  strings,
  bookkeeping,
  history,
  automata,
  result,
};

inline constexpr std::size_t kCategoryCount = 7;

std::string_view category_name(Category c);

// Counts live and peak bytes for one parse or bench case. Not thread-safe;
// a ledger belongs to the thread that installed it.
class SpaceLedger {
 public:
  void allocate(Category c, std::size_t bytes);
  void release(Category c, std::size_t bytes);

  std::size_t live() const { return live_total_; }
  std::size_t peak() const { return peak_total_; }
  std::size_t live(Category c) const { return live_[index(c)]; }
  std::size_t peak(Category c) const { return peak_[index(c)]; }

  // Peak is reset to the current live value.
  void reset_peak();

 private:
  static std::size_t index(Category c) { return static_cast<std::size_t>(c); }

  std::array<std::size_t, kCategoryCount> live_{};
  std::array<std::size_t, kCategoryCount> peak_{};
  std::size_t live_total_ = 0;
  std::size_t peak_total_ = 0;
};

// The ledger allocations on this thread are charged to, or null.
SpaceLedger* current_ledger();

// Installs a ledger for the lifetime of the scope and restores the previous
// one on exit.
class LedgerScope {
 public:
  explicit LedgerScope(SpaceLedger* ledger);
  ~LedgerScope();
  LedgerScope(const LedgerScope&) = delete;
  LedgerScope& operator=(const LedgerScope&) = delete;

 private:
  SpaceLedger* previous_;
};

// Allocator that charges the ledger captured at construction. The category is
// carried at runtime so one container type serves every bucket.
template <class T>
class TrackingAllocator {
 public:
  using value_type = T;
  using propagate_on_container_move_assignment = std::true_type;
  using propagate_on_container_copy_assignment = std::true_type;
  using propagate_on_container_swap = std::true_type;

  TrackingAllocator() noexcept : ledger_(current_ledger()) {}
  explicit TrackingAllocator(Category c) noexcept
      : ledger_(current_ledger()), category_(c) {}
  template <class U>
  TrackingAllocator(const TrackingAllocator<U>& other) noexcept
      : ledger_(other.ledger()), category_(other.category()) {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    if (ledger_ != nullptr) ledger_->allocate(category_, n * sizeof(T));
    return p;
  }

  void deallocate(T* p, std::size_t n) noexcept {
    if (ledger_ != nullptr) ledger_->release(category_, n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  SpaceLedger* ledger() const noexcept { return ledger_; }
  Category category() const noexcept { return category_; }

  template <class U>
  bool operator==(const TrackingAllocator<U>& other) const noexcept {
    return ledger_ == other.ledger() && category_ == other.category();
  }

 private:
  SpaceLedger* ledger_;
  Category category_ = Category::bookkeeping;
};

template <class T>
using tracked_vector = std::vector<T, TrackingAllocator<T>>;

template <class T>
tracked_vector<T> make_tracked(Category c, std::size_t n = 0, const T& value = T{}) {
  return tracked_vector<T>(n, value, TrackingAllocator<T>(c));
}

}  // namespace reparse
