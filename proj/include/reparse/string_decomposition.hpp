#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "reparse/decomposition.hpp"
#include "reparse/simulation.hpp"
#include "reparse/space.hpp"

namespace reparse {

// Prefix/suffix/match sets for the two boundary states, over positions 0..n.
struct MatchSets {
  StateSet prefix_start, prefix_accept;
  StateSet suffix_start, suffix_accept;
  StateSet match_start, match_accept;
};

// Bits of a boundary set X.
inline constexpr std::uint8_t kBoundaryStart = 1;
inline constexpr std::uint8_t kBoundaryAccept = 2;

// Valid pairs as two flag bitsets over positions (one per boundary state),
// plus the position of every 64th pair so position(j) only scans a short
// stretch. Positions must be pushed in increasing order.
class ValidPairSeq {
 public:
  static constexpr std::size_t kMaxPosition = 0xFFFFFFFEu;

  ValidPairSeq()
      : start_(make_tracked<std::uint64_t>(Category::bookkeeping)),
        accept_(make_tracked<std::uint64_t>(Category::bookkeeping)),
        samples_(make_tracked<std::uint32_t>(Category::bookkeeping)) {}

  // Room for positions 0..last without regrowing.
  void reserve(std::size_t last) {
    start_.reserve(last / 64 + 1);
    accept_.reserve(last / 64 + 1);
  }

  void push(std::size_t pos, std::uint8_t x) {
    if (start_.size() <= pos / 64) {
      start_.resize(pos / 64 + 1, 0);
      accept_.resize(pos / 64 + 1, 0);
    }
    std::uint64_t bit = std::uint64_t{1} << (pos % 64);
    if (x & kBoundaryStart) start_[pos / 64] |= bit;
    if (x & kBoundaryAccept) accept_[pos / 64] |= bit;
    if (size_ % 64 == 0) samples_.push_back(static_cast<std::uint32_t>(pos));
    ++size_;
  }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  std::size_t position(std::size_t j) const {
    std::size_t from = samples_[j / 64], rest = j % 64;
    std::size_t w = from / 64;
    std::uint64_t bits = (start_[w] | accept_[w]) & (~std::uint64_t{0} << (from % 64));
    for (;;) {
      auto c = static_cast<std::size_t>(std::popcount(bits));
      if (rest < c) break;
      rest -= c;
      ++w;
      bits = start_[w] | accept_[w];
    }
    for (; rest > 0; --rest) bits &= bits - 1;
    return w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
  }

  std::uint8_t boundary(std::size_t j) const {
    std::size_t pos = position(j);
    std::uint8_t x = 0;
    if ((start_[pos / 64] >> (pos % 64)) & 1U) x |= kBoundaryStart;
    if ((accept_[pos / 64] >> (pos % 64)) & 1U) x |= kBoundaryAccept;
    return x;
  }

 private:
  tracked_vector<std::uint64_t> start_, accept_;
  tracked_vector<std::uint32_t> samples_;
  std::size_t size_ = 0;
};

enum class BlockLabel : std::uint8_t { outer, inner };

// Which rule of the labeling decided each block (for tests and monitors).
struct LabelCounts {
  std::size_t forced_outer = 0;
  std::size_t case1 = 0, case2 = 0;
  std::size_t case3a = 0, case3b = 0, case3c = 0, case3d = 0;
};

// Alternating outer/inner pieces. Piece p spans [bounds[p], bounds[p+1]);
// even pieces are outer, odd pieces are inner.
struct StringDecomposition {
  tracked_vector<std::uint32_t> bounds = make_tracked<std::uint32_t>(Category::bookkeeping);

  std::size_t inner_count() const { return bounds.size() / 2 - 1; }
  std::pair<std::size_t, std::size_t> outer(std::size_t i) const { return {bounds[2 * i], bounds[2 * i + 1]}; }
  std::pair<std::size_t, std::size_t> inner(std::size_t i) const { return {bounds[2 * i + 1], bounds[2 * i + 2]}; }
};

// Block j of the partition induced by v, for j in 0..v.size().
inline std::pair<std::size_t, std::size_t> block_range(const ValidPairSeq& v, std::size_t n, std::size_t j) {
  std::size_t lo = j == 0 ? 0 : v.position(j - 1);
  std::size_t hi = j == v.size() ? n : v.position(j);
  return {lo, hi};
}

std::string to_debug_string(const ValidPairSeq& v);

namespace detail {

inline void require_position_range(std::size_t n) {
  if (n > ValidPairSeq::kMaxPosition) throw std::length_error("string too long for valid-pair positions");
}

template <Simulator Sim>
bool runs_between(const Sim& sim, State from, State to, std::span<const Symbol> piece) {
  auto s = sim.make();
  sim.insert(s, from);
  sim.close(s, Direction::forward);
  for (Symbol c : piece) sim.advance(s, c, Direction::forward);
  return sim.contains(s, to);
}

}  // namespace detail

// `sim` runs the parent automaton; `start` and `accept` are the inner
// part's boundary states in it.
template <Simulator Sim>
MatchSets compute_match_sets(const Sim& sim, State start, State accept, std::span<const Symbol> q) {
  std::size_t n = q.size();
  MatchSets ms;
  for (StateSet* b : {&ms.prefix_start, &ms.prefix_accept, &ms.suffix_start, &ms.suffix_accept, &ms.match_start,
                      &ms.match_accept})
    *b = StateSet(n + 1, Category::match_sets);

  auto s = sim.make();
  sim.insert(s, sim.start());
  sim.close(s, Direction::forward);
  for (std::size_t i = 0;; ++i) {
    if (sim.contains(s, start)) ms.prefix_start.set(i);
    if (sim.contains(s, accept)) ms.prefix_accept.set(i);
    if (i == n) break;
    sim.advance(s, q[i], Direction::forward);
  }

  sim.clear(s);
  sim.insert(s, sim.accept());
  sim.close(s, Direction::backward);
  for (std::size_t i = n;; --i) {
    if (sim.contains(s, start)) ms.suffix_start.set(i);
    if (sim.contains(s, accept)) ms.suffix_accept.set(i);
    if (i == 0) break;
    sim.advance(s, q[i - 1], Direction::backward);
  }

  ms.match_start = ms.prefix_start;
  ms.match_start &= ms.suffix_start;
  ms.match_accept = ms.prefix_accept;
  ms.match_accept &= ms.suffix_accept;
  return ms;
}

template <Simulator Sim>
MatchSets compute_match_sets(const Sim& sim, const Decomposition& d, std::span<const Symbol> q) {
  return compute_match_sets(sim, d.parent_start, d.parent_accept, q);
}

template <Simulator Sim>
ValidPairSeq compute_valid_pairs(const Sim& sim, State start, State accept, std::span<const Symbol> q,
                                 const MatchSets& ms) {
  std::size_t n = q.size();
  detail::require_position_range(n);
  ValidPairSeq v;
  v.reserve(n);
  auto s = sim.make();
  sim.insert(s, sim.start());
  sim.close(s, Direction::forward);
  for (std::size_t i = 0;; ++i) {
    std::uint8_t x = 0;
    if (ms.match_start.test(i) && sim.contains(s, start)) x |= kBoundaryStart;
    if (ms.match_accept.test(i) && sim.contains(s, accept)) x |= kBoundaryAccept;
    if (x != 0) {
      v.push(i, x);
      sim.clear(s);
      if (x & kBoundaryStart) sim.insert(s, start);
      if (x & kBoundaryAccept) sim.insert(s, accept);
      sim.close(s, Direction::forward);
    }
    if (i == n) break;
    sim.advance(s, q[i], Direction::forward);
  }
  return v;
}

template <Simulator Sim>
ValidPairSeq compute_valid_pairs(const Sim& sim, const Decomposition& d, std::span<const Symbol> q,
                                 const MatchSets& ms) {
  return compute_valid_pairs(sim, d.parent_start, d.parent_accept, q, ms);
}

// Labels blocks 0..v.size(). `inner` runs the inner automaton, `outer` the
// outer one (both as produced by decompose).
template <Simulator InnerSim, Simulator OuterSim>
tracked_vector<BlockLabel> label_partition(const ValidPairSeq& v, std::span<const Symbol> q, const Decomposition& d,
                                           const InnerSim& inner, const OuterSim& outer,
                                           LabelCounts* counts = nullptr) {
  LabelCounts local;
  LabelCounts& c = counts ? *counts : local;
  std::size_t k = v.size();
  auto labels = make_tracked<BlockLabel>(Category::bookkeeping, k + 1, BlockLabel::outer);
  c.forced_outer += k == 0 ? 1 : 2;
  for (std::size_t j = 1; j < k; ++j) {
    std::uint8_t before = v.boundary(j - 1), after = v.boundary(j);
    if (before == kBoundaryStart && after == kBoundaryAccept) {
      labels[j] = BlockLabel::inner;
      ++c.case1;
      continue;
    }
    if (before == kBoundaryAccept && after == kBoundaryStart) {
      ++c.case2;
      continue;
    }
    auto [lo, hi] = block_range(v, q.size(), j);
    auto piece = q.subspan(lo, hi - lo);
    bool in = detail::runs_between(inner, inner.start(), inner.accept(), piece);
    bool out = detail::runs_between(outer, d.outer_accept, d.outer_start, piece);
    if (in && out) {
      if (d.eps_back_path_in_outer) {
        labels[j] = BlockLabel::inner;
        ++c.case3c;
      } else {
        ++c.case3d;
      }
    } else if (in) {
      labels[j] = BlockLabel::inner;
      ++c.case3a;
    } else if (out) {
      ++c.case3b;
    } else {
      throw std::logic_error("block " + std::to_string(j) + " matches neither part");
    }
  }
  return labels;
}

// Merges runs of equal labels into the alternating decomposition.
StringDecomposition merge_labels(std::span<const BlockLabel> labels, const ValidPairSeq& v, std::size_t n);

// Re-checks the decomposition invariants; throws std::logic_error on the
// first violation.
template <Simulator InnerSim, Simulator OuterSim>
void validate(const StringDecomposition& sd, std::span<const Symbol> q, const Decomposition& d,
              const InnerSim& inner, const OuterSim& outer) {
  const auto& b = sd.bounds;
  if (b.size() < 2 || b.size() % 2 != 0 || b.front() != 0 || b.back() != q.size())
    throw std::logic_error("decomposition does not cover the string");
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    if (b[p] > b[p + 1]) throw std::logic_error("decomposition bounds decrease");
    if (p % 2 == 1 && b[p] == b[p + 1]) throw std::logic_error("empty inner piece");
  }
  std::size_t l = sd.inner_count();
  if (2 * l > q.size() + 1) throw std::logic_error("too many inner pieces");

  for (std::size_t i = 0; i < l; ++i) {
    auto [lo, hi] = sd.inner(i);
    if (!detail::runs_between(inner, inner.start(), inner.accept(), q.subspan(lo, hi - lo)))
      throw std::logic_error("inner piece " + std::to_string(i) + " rejected by the inner part");
  }

  auto s = outer.make();
  outer.insert(s, outer.start());
  outer.close(s, Direction::forward);
  for (std::size_t i = 0; i <= l; ++i) {
    if (i > 0) outer.advance(s, d.beta, Direction::forward);
    auto [lo, hi] = sd.outer(i);
    for (std::size_t t = lo; t < hi; ++t) outer.advance(s, q[t], Direction::forward);
  }
  if (!outer.contains(s, outer.accept())) throw std::logic_error("outer string rejected by the outer part");
}

// Steps 1 and 2; only the parent automaton is needed.
template <Simulator Sim>
ValidPairSeq find_valid_pairs(const Sim& parent, State start, State accept, std::span<const Symbol> q) {
  MatchSets ms = compute_match_sets(parent, start, accept, q);
  return compute_valid_pairs(parent, start, accept, q, ms);
}

// Step 3 plus validation; only the two parts are needed.
template <Simulator InnerSim, Simulator OuterSim>
StringDecomposition finish_string(const ValidPairSeq& v, const InnerSim& inner, const OuterSim& outer,
                                  const Decomposition& d, std::span<const Symbol> q, LabelCounts* counts = nullptr) {
  StringDecomposition sd;
  {
    auto labels = label_partition(v, q, d, inner, outer, counts);
    sd = merge_labels(labels, v, q.size());
  }
  validate(sd, q, d, inner, outer);
  return sd;
}

template <Simulator ParentSim, Simulator InnerSim, Simulator OuterSim>
StringDecomposition decompose_string(const ParentSim& parent, const InnerSim& inner, const OuterSim& outer,
                                     const Decomposition& d, std::span<const Symbol> q,
                                     LabelCounts* counts = nullptr) {
  ValidPairSeq v = find_valid_pairs(parent, d.parent_start, d.parent_accept, q);
  return finish_string(v, inner, outer, d, q, counts);
}

}  // namespace reparse
