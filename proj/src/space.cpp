#include "reparse/space.hpp"

#include <algorithm>
#include <cassert>

namespace reparse {

namespace {
thread_local SpaceLedger* t_ledger = nullptr;
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::state_sets: return "state_sets";
    case Category::match_sets: return "match_sets";
    case Category::strings: return "strings";
    case Category::bookkeeping: return "bookkeeping";
    case Category::history: return "history";
    case Category::automata: return "automata";
    case Category::result: return "result";
  }
  return "unknown";
}

void SpaceLedger::allocate(Category c, std::size_t bytes) {
  auto i = index(c);
  live_[i] += bytes;
  live_total_ += bytes;
  peak_[i] = std::max(peak_[i], live_[i]);
  peak_total_ = std::max(peak_total_, live_total_);
}

void SpaceLedger::release(Category c, std::size_t bytes) {
  auto i = index(c);
  assert(live_[i] >= bytes);
  live_[i] -= bytes;
  live_total_ -= bytes;
}

void SpaceLedger::reset_peak() {
  peak_ = live_;
  peak_total_ = live_total_;
}

SpaceLedger* current_ledger() { return t_ledger; }

LedgerScope::LedgerScope(SpaceLedger* ledger) : previous_(t_ledger) { t_ledger = ledger; }

LedgerScope::~LedgerScope() { t_ledger = previous_; }

}  // namespace reparse
