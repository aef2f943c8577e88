#include "reparse/decomposition.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace reparse {

namespace {

std::vector<std::size_t> subtree_node_counts(const Ast& tree) {
  std::vector<std::size_t> size(tree.size(), 1);
  auto order = preorder(tree);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node& n = tree[*it];
    if (n.left != kNoNode) size[static_cast<std::size_t>(*it)] += size[static_cast<std::size_t>(n.left)];
    if (n.right != kNoNode) size[static_cast<std::size_t>(*it)] += size[static_cast<std::size_t>(n.right)];
  }
  return size;
}

// Copies the tree, replacing `cut` (if any) with `replacement`. Records the
// new-to-old node correspondence.
using Origin = tracked_vector<NodeId>;

std::size_t subtree_size(const Ast& tree, NodeId id) {
  if (id == kNoNode) return 0;
  return 1 + subtree_size(tree, tree[id].left) + subtree_size(tree, tree[id].right);
}

NodeId copy_with(const Ast& src, NodeId id, NodeId cut, const Node& replacement, Ast& dst, Origin& origin) {
  NodeId out;
  if (id == cut) {
    out = dst.add(replacement);
  } else {
    Node n = src[id];
    if (n.left != kNoNode) n.left = copy_with(src, n.left, cut, replacement, dst, origin);
    if (n.right != kNoNode) n.right = copy_with(src, n.right, cut, replacement, dst, origin);
    out = dst.add(n);
  }
  if (origin.size() <= static_cast<std::size_t>(out)) origin.resize(static_cast<std::size_t>(out) + 1, kNoNode);
  origin[static_cast<std::size_t>(out)] = id;
  return out;
}

std::vector<NodeId> parents(const Ast& tree) {
  std::vector<NodeId> parent(tree.size(), kNoNode);
  for (NodeId id : preorder(tree))
    for (NodeId c : {tree[id].left, tree[id].right})
      if (c != kNoNode) parent[static_cast<std::size_t>(c)] = id;
  return parent;
}

tracked_vector<State> state_map(const Automaton& part, const Origin& origin, const Tnfa& parent) {
  auto map = make_tracked<State>(Category::automata, part.nfa.state_count());
  for (std::size_t id = 0; id < part.tree.size(); ++id) {
    NodeId from = origin[id];
    if (from == kNoNode) continue;
    auto [ps, pf] = parent.node_bounds(from);
    auto [s, f] = part.nfa.node_bounds(static_cast<NodeId>(id));
    map[s] = ps;
    map[f] = pf;
  }
  return map;
}

}  // namespace

Automaton Automaton::from_tree(Ast tree) {
  Automaton a{std::move(tree), Tnfa{}};
  a.nfa = build_tnfa(a.tree);
  return a;
}

SeparatorEdge find_separator(const Ast& tree) {
  if (tree.size() < 2) throw std::invalid_argument("separator needs at least two nodes");
  auto size = subtree_node_counts(tree);
  std::size_t v = size[static_cast<std::size_t>(tree.root())];
  auto parent = parents(tree);
  SeparatorEdge best;
  std::size_t best_larger = std::numeric_limits<std::size_t>::max();
  for (NodeId c : preorder(tree)) {
    if (c == tree.root()) continue;
    std::size_t in = size[static_cast<std::size_t>(c)];
    std::size_t larger = std::max(in, v - in);
    if (larger < best_larger) {
      best_larger = larger;
      best = {parent[static_cast<std::size_t>(c)], c};
    }
  }
  return best;
}

std::vector<std::size_t> subtree_state_counts(const Ast& tree) {
  std::vector<std::size_t> states(tree.size(), 0);
  auto order = preorder(tree);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node& n = tree[*it];
    auto at = [&](NodeId id) { return states[static_cast<std::size_t>(id)]; };
    std::size_t s = 0;
    switch (n.kind) {
      case NodeKind::epsilon:
      case NodeKind::literal:
      case NodeKind::beta: s = 2; break;
      case NodeKind::concat: s = at(n.left) + at(n.right) - 1; break;
      case NodeKind::alt: s = at(n.left) + at(n.right) + 2; break;
      case NodeKind::star: s = at(n.left) + 2; break;
      case NodeKind::loop: s = at(n.left); break;
    }
    states[static_cast<std::size_t>(*it)] = s;
  }
  return states;
}

NodeId choose_inner(const Ast& tree) {
  auto states = subtree_state_counts(tree);
  std::size_t k = states[static_cast<std::size_t>(tree.root())];
  auto parent = parents(tree);
  NodeId best = kNoNode;
  std::size_t best_larger = std::numeric_limits<std::size_t>::max();
  for (NodeId c : preorder(tree)) {
    if (c == tree.root() || tree[parent[static_cast<std::size_t>(c)]].kind == NodeKind::loop) continue;
    std::size_t in = states[static_cast<std::size_t>(c)];
    std::size_t larger = std::max(in, k - in + 2);
    if (larger < best_larger) {
      best_larger = larger;
      best = c;
    }
  }
  return best;
}

Decomposition decompose(const Automaton& a, std::uint32_t beta_id) {
  if (a.nfa.state_count() <= 2) throw TooSmall();
  NodeId inner = choose_inner(a.tree);
  if (inner == kNoNode) throw TooSmall();
  return decompose(a, inner, beta_id);
}

namespace {

Decomposition build_parts(const Ast& tree, NodeId inner_root, std::uint32_t beta_id, const Tnfa* parent) {
  if (inner_root == tree.root()) throw std::invalid_argument("inner part must be a proper subtree");
  if (beta_id > kMaxBetaId) throw std::length_error("beta id space exhausted");

  Decomposition d;
  d.inner_root = inner_root;
  d.beta = beta_symbol(beta_id);
  d.inner_accepts_eps = nullable(tree, inner_root);
  if (parent) std::tie(d.parent_start, d.parent_accept) = parent->node_bounds(inner_root);

  Node sentinel;
  sentinel.kind = NodeKind::beta;
  sentinel.beta_id = beta_id;
  sentinel.beta_eps = d.inner_accepts_eps;

  // Exact reserves: growth by doubling would briefly hold two copies.
  std::size_t inner_size = subtree_size(tree, inner_root);
  std::size_t outer_size = tree.size() - inner_size + 1;
  Origin outer_origin = make_tracked<NodeId>(Category::bookkeeping);
  outer_origin.reserve(outer_size);
  Ast outer_tree;
  outer_tree.reserve(outer_size);
  outer_tree.set_root(copy_with(tree, tree.root(), inner_root, sentinel, outer_tree, outer_origin));
  d.outer = Automaton::from_tree(std::move(outer_tree));
  if (parent) d.outer_to_parent = state_map(d.outer, outer_origin, *parent);

  // The sentinel node sits where the inner root was.
  for (std::size_t id = 0; id < outer_origin.size(); ++id)
    if (outer_origin[id] == inner_root) std::tie(d.outer_start, d.outer_accept) = d.outer.nfa.node_bounds(static_cast<NodeId>(id));

  StateStack stack = make_stack();
  StateSet back = singleton(d.outer.nfa, d.outer_accept);
  close_in_place(d.outer.nfa, back, Direction::forward, stack);
  d.eps_back_path_in_outer = back.test(d.outer_start);

  Origin inner_origin = make_tracked<NodeId>(Category::bookkeeping);
  inner_origin.reserve(inner_size + 1);
  Ast inner_tree;
  inner_tree.reserve(inner_size + 1);
  NodeId root = copy_with(tree, inner_root, kNoNode, Node{}, inner_tree, inner_origin);
  if (d.eps_back_path_in_outer) {
    Node loop;
    loop.kind = NodeKind::loop;
    loop.left = root;
    root = inner_tree.add(loop);
    inner_origin.resize(inner_tree.size(), kNoNode);
    inner_origin[static_cast<std::size_t>(root)] = inner_root;
  }
  inner_tree.set_root(root);
  d.inner = Automaton::from_tree(std::move(inner_tree));
  if (parent) d.inner_to_parent = state_map(d.inner, inner_origin, *parent);
  return d;
}

}  // namespace

Decomposition decompose(const Automaton& a, NodeId inner_root, std::uint32_t beta_id) {
  if (a.nfa.state_count() <= 2) throw TooSmall();
  return build_parts(a.tree, inner_root, beta_id, &a.nfa);
}

Decomposition decompose_parts(const Ast& tree, NodeId inner_root, std::uint32_t beta_id) {
  if (tree.size() < 2) throw TooSmall();
  return build_parts(tree, inner_root, beta_id, nullptr);
}

}  // namespace reparse
