#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "reparse/automata.hpp"
#include "reparse/syntax.hpp"

namespace reparse {

// A tree together with its Thompson automaton.
struct Automaton {
  Ast tree;
  Tnfa nfa;

  static Automaton from_tree(Ast tree);
};

struct SeparatorEdge {
  NodeId parent = kNoNode;
  NodeId child = kNoNode;
};

// Edge whose removal leaves two parts of at most 2v/3 + 1 nodes each. Among
// qualifying edges the one minimizing the larger part wins, then the child
// with the smallest preorder index. Requires more than one node.
SeparatorEdge find_separator(const Ast& tree);

// Thompson state count of each subtree, indexed by node id.
std::vector<std::size_t> subtree_state_counts(const Ast& tree);

// Inner root chosen for splitting an automaton: minimizes the larger of the
// two resulting state counts (ties by preorder), never the child of a loop
// node.
NodeId choose_inner(const Ast& tree);

class TooSmall : public std::invalid_argument {
 public:
  TooSmall() : std::invalid_argument("automaton has at most 2 states") {}
};

struct Decomposition {
  Automaton outer;
  Automaton inner;
  NodeId inner_root = kNoNode;  // in the parent tree

  // Boundary states in parent, outer and inner numbering.
  State parent_start = 0;
  State parent_accept = 0;
  State outer_start = 0;
  State outer_accept = 0;
  State inner_start() const { return inner.nfa.start(); }
  State inner_accept() const { return inner.nfa.accept(); }

  Symbol beta = kBetaBase;
  bool inner_accepts_eps = false;
  bool eps_back_path_in_outer = false;

  tracked_vector<State> outer_to_parent = make_tracked<State>(Category::automata);
  tracked_vector<State> inner_to_parent = make_tracked<State>(Category::automata);
};

// Splits at the chosen inner subtree. The outer part replaces the subtree by
// a beta leaf (plus a parallel epsilon edge when the inner part accepts the
// empty string); the inner part gets a direct epsilon edge from its accept
// back to its start when the outer part has an epsilon path from the
// boundary accept state to the boundary start state.
Decomposition decompose(const Automaton& a, NodeId inner_root, std::uint32_t beta_id);
Decomposition decompose(const Automaton& a, std::uint32_t beta_id);

// The two parts and their flags from the tree alone. Parent boundary states
// and the state maps are left empty; the engine uses this after it has
// released the parent automaton.
Decomposition decompose_parts(const Ast& tree, NodeId inner_root, std::uint32_t beta_id);

}  // namespace reparse
