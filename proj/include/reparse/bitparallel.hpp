#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reparse/automata.hpp"
#include "reparse/parse_engine.hpp"
#include "reparse/simulation.hpp"

namespace reparse {

// Micro automata are cut from the series-parallel (SP) tree of the Thompson
// NFA rather than from the parse tree. Every SP node is a two-terminal
// component: a leaf is one transition, S(x, y) joins x's sink to y's source,
// P(x, y) shares both terminals. A star's back edge is a leaf oriented
// against its parallel sibling. A binary SP node whose children are both
// collapsed has at most three states, which is what makes t = 3 workable.
//
// Canonical micro encoding, one byte token per SP node in preorder:
//   'S' series, 'P' parallel,
//   'e' epsilon leaf source to sink, 'r' epsilon leaf sink to source,
//   'c' consuming leaf (character or beta),
//   'p' followed by '0'..'3' for a collapsed child component; bit 0 means an
//       epsilon path from its source to its sink, bit 1 the reverse.
// Local states are first numbered by a preorder walk (root source 0, root
// sink 1, every S node's middle state next), then renumbered so that each
// consuming transition goes from local i to local i + 1. Both steps depend on
// the encoding only, so equal encodings share closure entries.

inline constexpr std::size_t kMaxMicroStates = 63;

// One interned micro shape; immutable apart from its memo.
struct MicroShape {
  std::string encoding;
  std::uint8_t states = 0;
  std::vector<std::uint8_t> renumber;  // walk index -> local state
  std::uint64_t consuming_from = 0;    // local i reads a symbol into i + 1
  std::uint64_t eps_out[kMaxMicroStates] = {};
  std::uint64_t eps_in[kMaxMicroStates] = {};
};

// Memoized epsilon closures keyed by (shape, local set), in both directions.
// Lookups take a shared lock; a miss computes outside the lock and inserts
// under an exclusive one.
class ClosureTable {
 public:
  static ClosureTable& shared();

  const MicroShape* intern(std::string_view encoding);
  std::uint64_t close(const MicroShape* shape, std::uint64_t set, Direction d);

  std::size_t shapes() const;
  std::size_t entries() const;

  // Calls f(shape, direction, set, closed) for every memoized entry.
  template <class F>
  void for_each_entry(F&& f) const {
    std::shared_lock lock(mutex_);
    for (const auto& [shape, memo] : memo_)
      for (int d = 0; d < 2; ++d)
        for (const auto& [set, closed] : memo.by_dir[d]) f(*shape, static_cast<Direction>(d), set, closed);
  }

 private:
  struct Memo {
    std::unordered_map<std::uint64_t, std::uint64_t> by_dir[2];
  };
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::unique_ptr<MicroShape>> shapes_;
  std::unordered_map<const MicroShape*, Memo> memo_;
};

// Builds a shape from its encoding; throws std::invalid_argument on a
// malformed one or more than kMaxMicroStates states.
std::unique_ptr<MicroShape> decode_micro(std::string_view encoding);

// The shape as a plain Tnfa over its local states: epsilon leaves and the
// epsilon paths of collapsed children become epsilon transitions, consuming
// leaves read symbol 0. Start is local 0, accept local 1 (renumbered).
Tnfa micro_tnfa(const MicroShape& shape);

struct Micro {
  const MicroShape* shape = nullptr;
  std::uint32_t parent = 0;       // self for the root
  std::uint8_t in_parent[2] = {};  // this micro's source/sink as parent locals
  std::uint8_t terminal[2] = {};   // the same states as own locals
  std::uint32_t first_child = 0, child_end = 0;  // range in MicroForest::children
  std::uint32_t local_begin = 0;                 // range start in globals/consuming
};

// Tree of micro automata, numbered in preorder (parent before children,
// children left to right).
struct MicroForest {
  std::size_t t = 0;
  State start = 0, accept = 0;
  std::size_t state_count = 0;
  tracked_vector<Micro> micros = make_tracked<Micro>(Category::automata);
  tracked_vector<std::uint32_t> children = make_tracked<std::uint32_t>(Category::automata);
  // Per micro, indexed by local_begin + local state.
  tracked_vector<State> globals = make_tracked<State>(Category::automata);
  tracked_vector<TransitionId> consuming = make_tracked<TransitionId>(Category::automata);
  // Symbol dictionary: entries [dict_offsets[c], dict_offsets[c + 1]) hold
  // (micro, mask of local targets of transitions reading c).
  tracked_vector<std::uint32_t> dict_offsets = make_tracked<std::uint32_t>(Category::automata);
  tracked_vector<std::uint32_t> dict_micro = make_tracked<std::uint32_t>(Category::automata);
  tracked_vector<std::uint64_t> dict_mask = make_tracked<std::uint64_t>(Category::automata);
  // Copies of each global state: [copy_offsets[q], copy_offsets[q + 1]).
  tracked_vector<std::uint32_t> copy_offsets = make_tracked<std::uint32_t>(Category::automata);
  tracked_vector<std::uint32_t> copy_micro = make_tracked<std::uint32_t>(Category::automata);
  tracked_vector<std::uint8_t> copy_bit = make_tracked<std::uint8_t>(Category::automata);
  ClosureTable* table = nullptr;

  std::size_t size() const { return micros.size(); }
};

// Requires t >= 3. `a` must be build_tnfa(tree).
MicroForest build_micro_forest(const Ast& tree, const Tnfa& a, std::size_t t,
                               ClosureTable& table = ClosureTable::shared());

// One word per micro.
using ForestSet = tracked_vector<std::uint64_t>;

// Simulation on a micro forest. Closure runs two DFS passes over the forest
// (left to right forward, right to left backward) and then aligns the copies
// of shared states. With `third_pass_changes` set, a third pass runs after
// every closure and each set it changes is counted.
class FastSim {
 public:
  using Set = ForestSet;

  explicit FastSim(const MicroForest& f, std::size_t* third_pass_changes = nullptr)
      : f_(&f), third_(third_pass_changes) {}

  State start() const { return f_->start; }
  State accept() const { return f_->accept; }
  Set make() const { return make_tracked<std::uint64_t>(Category::state_sets, f_->size(), 0); }
  bool contains(const Set& s, State q) const;
  void insert(Set& s, State q) const;
  void clear(Set& s) const { std::fill(s.begin(), s.end(), 0); }
  void close(Set& s, Direction d) const;
  void advance(Set& s, Symbol c, Direction d) const;

  // Character step only, no closure.
  void move(Set& s, Symbol c, Direction d) const;

  StateSet to_global(const Set& s) const;
  Set from_global(const StateSet& s) const;

 private:
  void pass(Set& s, std::uint32_t m, Direction d) const;
  void align(Set& s) const;

  const MicroForest* f_;
  std::size_t* third_;
};

static_assert(Simulator<FastSim>);

// s must be closed in direction d; the result is closed too.
StateSet fast_step(const MicroForest& f, const StateSet& s, Symbol c, Direction d = Direction::forward);
bool fast_match(const MicroForest& f, std::span<const Symbol> q);

// Stores the n+1 forward sets, then walks back with backward closures. Picks
// the first micro (in preorder) with a candidate, then its lowest local
// state. nullopt when q is rejected.
std::optional<CompressedPath> fast_parse_base(const MicroForest& f, std::span<const Symbol> q,
                                              std::size_t* third_pass_changes = nullptr);

class FastBackend : public PathBackend {
 public:
  FastBackend(const EngineConfig& cfg, std::size_t t) : cfg_(cfg), t_(t) {}
  bool is_base(std::size_t n, std::size_t k) const override { return n < t_ || k < t_; }
  CompressedPath solve_base(const Ast& tree, const Tnfa& a, std::span<const Symbol> q) const override;
  ValidPairSeq valid_pairs(const Ast& tree, const Tnfa& a, State start, State accept,
                           std::span<const Symbol> q) const override;
  StringDecomposition finish(const ValidPairSeq& v, const Decomposition& d, std::span<const Symbol> q,
                             LabelCounts* counts) const override;

 private:
  std::size_t* third() const { return cfg_.monitor ? &cfg_.monitor->third_pass_changes : nullptr; }

  const EngineConfig& cfg_;
  std::size_t t_;
};

// parse(pattern, q, Engine::bitparallel) with micro size t.
ParseResult fast_parse(std::string_view pattern, std::string_view q, std::size_t t);

}  // namespace reparse
