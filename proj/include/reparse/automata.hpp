#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reparse/space.hpp"
#include "reparse/state_set.hpp"
#include "reparse/syntax.hpp"

namespace reparse {

using State = std::uint32_t;
using TransitionId = std::uint32_t;
inline constexpr TransitionId kNoTransition = 0xFFFFFFFFu;

enum class LabelKind : std::uint8_t { eps, character, beta };

struct Label {
  LabelKind kind = LabelKind::eps;
  Symbol symbol = 0;        // byte for characters, beta_symbol(id) for beta
  std::int32_t position = 0;  // literal position for characters, 0 otherwise

  bool consumes(Symbol s) const { return kind != LabelKind::eps && symbol == s; }
};

struct Transition {
  State source = 0;
  State target = 0;
  Label label;
};

enum class Direction : std::uint8_t { forward, backward };

// Thompson NFA. States are 0..k-1 in construction order. When built from a
// tree, `node_bounds(id)` gives the start/accept pair of each tree node.
class Tnfa {
 public:
  Tnfa();

  std::size_t state_count() const { return state_count_; }
  State start() const { return start_; }
  State accept() const { return accept_; }
  std::span<const Transition> transitions() const { return transitions_; }
  const Transition& transition(TransitionId id) const { return transitions_[id]; }

  // Transition ids leaving (forward) or entering (backward) a state.
  std::span<const TransitionId> adjacent(State s, Direction d) const;

  std::pair<State, State> node_bounds(NodeId id) const { return node_bounds_[static_cast<std::size_t>(id)]; }
  std::size_t node_count() const { return node_bounds_.size(); }

  // Transition carrying the given literal position, or kNoTransition.
  TransitionId transition_for_position(std::int32_t position) const;

  friend Tnfa build_tnfa(const Ast& ast);
  friend Tnfa reverse(const Tnfa& a);
  friend Tnfa make_tnfa(std::size_t states, State start, State accept, std::span<const Transition> ts);

 private:
  void index();

  std::size_t state_count_ = 0;
  State start_ = 0;
  State accept_ = 0;
  tracked_vector<Transition> transitions_;
  tracked_vector<std::uint32_t> out_offsets_;
  tracked_vector<TransitionId> out_ids_;
  tracked_vector<std::uint32_t> in_offsets_;
  tracked_vector<TransitionId> in_ids_;
  tracked_vector<std::pair<State, State>> node_bounds_;
  tracked_vector<TransitionId> by_position_;
};

Tnfa build_tnfa(const Ast& ast);

// Transitions each tree node introduces, in the order build_tnfa adds them
// (unused slots hold kNoTransition).
using NodeEdges = tracked_vector<std::array<TransitionId, 4>>;
NodeEdges node_edges(const Ast& ast);

// Automaton from an explicit transition list (tests and tools).
Tnfa make_tnfa(std::size_t states, State start, State accept, std::span<const Transition> ts);

// All transitions flipped, start and accept swapped.
Tnfa reverse(const Tnfa& a);

// Closes `s` under epsilon transitions in the given direction. Beta and
// character transitions are never followed. `stack` is scratch space.
// Work stack for closures; charged to the state-set category.
using StateStack = tracked_vector<State>;
inline StateStack make_stack() { return make_tracked<State>(Category::state_sets); }

void close_in_place(const Tnfa& a, StateSet& s, Direction d, StateStack& stack);

StateSet eps_closure(const Tnfa& a, const StateSet& s);

// Targets (forward) or sources (backward) of transitions consuming `c` from
// states in `s`, without closing the result.
void move_in_place(const Tnfa& a, const StateSet& s, Symbol c, Direction d, StateSet& out);

// Epsilon closure of the character move. `s` should be epsilon closed.
StateSet step(const Tnfa& a, const StateSet& s, Symbol c);

StateSet singleton(const Tnfa& a, State s);

bool accepts(const Tnfa& a, std::span<const Symbol> q);
bool accepts(const Tnfa& a, std::string_view bytes);

std::vector<Symbol> to_symbols(std::string_view bytes);

// One line per transition, `src -> dst [label]`, after a header line
// `states=K start=S accept=F`. Labels: `eps`, `'c' #pos` (hex escape
// `\xHH` for non-printable bytes), `beta#id`.
std::string to_debug_string(const Tnfa& a);

}  // namespace reparse
