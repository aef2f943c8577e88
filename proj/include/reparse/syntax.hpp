#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reparse/space.hpp"

namespace reparse {

// Input alphabet symbol. Values below kBetaBase are raw bytes; values at or
// above it stand for the sentinel transition of one automaton split.
using Symbol = std::uint16_t;
inline constexpr Symbol kBetaBase = 256;
inline constexpr std::uint32_t kMaxBetaId = 0xFFFFu - kBetaBase;

inline constexpr Symbol beta_symbol(std::uint32_t id) { return static_cast<Symbol>(kBetaBase + id); }
inline constexpr bool is_beta(Symbol s) { return s >= kBetaBase; }

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind : std::uint8_t {
  epsilon,
  literal,
  // Sentinel leaf standing in for a removed inner subtree. With `beta_eps` it
  // also carries a parallel epsilon edge (the inner part accepts the empty
  // string).
  beta,
  concat,
  alt,
  star,
  // Child plus a direct epsilon edge from its accept back to its start. Only
  // produced by decomposition; adds no states.
  loop,
};

struct Node {
  NodeKind kind = NodeKind::epsilon;
  std::uint8_t byte = 0;
  bool beta_eps = false;
  std::int32_t position = 0;  // 1-based literal position, literals only
  std::uint32_t beta_id = 0;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
};

// Parse tree stored as an arena of nodes addressed by NodeId.
class Ast {
 public:
  Ast() : nodes_(TrackingAllocator<Node>(Category::automata)) {}

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& operator[](NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  NodeId add(const Node& n) {
    nodes_.push_back(n);
    return static_cast<NodeId>(nodes_.size() - 1);
  }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  Node& mutable_node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  // Called once building is done; drops spare capacity.
  void set_root(NodeId id) {
    root_ = id;
    nodes_.shrink_to_fit();
  }

  std::size_t child_count(NodeId id) const;

 private:
  tracked_vector<Node> nodes_;
  NodeId root_ = kNoNode;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, std::string reason);
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

// Grammar:
//   pattern := alt ; alt := cat ('|' cat)* ; cat := rep* ; rep := atom '*'* ;
//   atom := '(' alt ')' | '\' meta | plain-byte ; empty cat is epsilon.
// Concatenation and union associate to the left. Literal positions are
// assigned 1..m in left-to-right order.
Ast parse_pattern(std::string_view pattern);

// Number of literal leaves in the tree reachable from the root.
std::size_t literal_count(const Ast& ast);

// Fully parenthesized rendering that parses back to the same tree.
std::string unparse(const Ast& ast);
std::string unparse(const Ast& ast, NodeId from);

// Structural equality of the subtrees rooted at the two roots.
bool same_structure(const Ast& a, const Ast& b);

// Nodes in preorder starting at the root.
std::vector<NodeId> preorder(const Ast& ast);

// Whether the subtree accepts the empty string.
bool nullable(const Ast& ast, NodeId id);

// Copy of the subtree at `from` as a fresh tree.
Ast subtree(const Ast& ast, NodeId from);

}  // namespace reparse
