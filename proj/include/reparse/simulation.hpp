#pragma once

#include <concepts>
#include <vector>

#include "reparse/automata.hpp"

namespace reparse {

// State-set simulation over one automaton, in either direction. Sets handed
// to advance() must be closed in the same direction; advance() leaves them
// closed. String decomposition is written against this so the bit-parallel
// engine can substitute its own sets.
template <class S>
concept Simulator = requires(const S& sim, typename S::Set& set, const typename S::Set& cset, State q,
                             Symbol c, Direction d) {
  { sim.make() } -> std::same_as<typename S::Set>;
  { sim.start() } -> std::same_as<State>;
  { sim.accept() } -> std::same_as<State>;
  { sim.contains(cset, q) } -> std::same_as<bool>;
  sim.insert(set, q);
  sim.clear(set);
  sim.close(set, d);
  sim.advance(set, c, d);
};

// Plain bitset simulation on a Tnfa. Holds scratch space, so one instance
// serves one thread.
class NaiveSim {
 public:
  using Set = StateSet;

  explicit NaiveSim(const Tnfa& a) : a_(&a), scratch_(a.state_count()) {}

  const Tnfa& nfa() const { return *a_; }
  State start() const { return a_->start(); }
  State accept() const { return a_->accept(); }

  Set make() const { return StateSet(a_->state_count()); }
  bool contains(const Set& s, State q) const { return s.test(q); }
  void insert(Set& s, State q) const { s.set(q); }
  void clear(Set& s) const { s.clear(); }
  void close(Set& s, Direction d) const { close_in_place(*a_, s, d, stack_); }
  void advance(Set& s, Symbol c, Direction d) const {
    move_in_place(*a_, s, c, d, scratch_);
    std::swap(s, scratch_);
    close_in_place(*a_, s, d, stack_);
  }

 private:
  const Tnfa* a_;
  mutable StateSet scratch_;
  mutable StateStack stack_ = make_stack();
};

static_assert(Simulator<NaiveSim>);

}  // namespace reparse
