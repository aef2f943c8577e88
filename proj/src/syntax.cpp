#include "reparse/syntax.hpp"

#include <utility>

namespace reparse {

SyntaxError::SyntaxError(std::size_t offset, std::string reason)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

std::size_t Ast::child_count(NodeId id) const {
  switch ((*this)[id].kind) {
    case NodeKind::concat:
    case NodeKind::alt: return 2;
    case NodeKind::star:
    case NodeKind::loop: return 1;
    default: return 0;
  }
}

namespace {

bool is_meta(char c) { return c == '(' || c == ')' || c == '|' || c == '*' || c == '\\'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Ast run() {
    NodeId root = parse_alt();
    if (pos_ < src_.size()) throw SyntaxError(pos_, "unbalanced ')'");
    ast_.set_root(root);
    return std::move(ast_);
  }

 private:
  NodeId parse_alt() {
    NodeId left = parse_cat();
    while (pos_ < src_.size() && src_[pos_] == '|') {
      ++pos_;
      NodeId right = parse_cat();
      Node n;
      n.kind = NodeKind::alt;
      n.left = left;
      n.right = right;
      left = ast_.add(n);
    }
    return left;
  }

  NodeId parse_cat() {
    NodeId acc = kNoNode;
    while (pos_ < src_.size() && src_[pos_] != '|' && src_[pos_] != ')') {
      NodeId rep = parse_rep();
      if (acc == kNoNode) {
        acc = rep;
      } else {
        Node n;
        n.kind = NodeKind::concat;
        n.left = acc;
        n.right = rep;
        acc = ast_.add(n);
      }
    }
    if (acc == kNoNode) acc = ast_.add(Node{});
    return acc;
  }

  NodeId parse_rep() {
    NodeId atom = parse_atom();
    while (pos_ < src_.size() && src_[pos_] == '*') {
      ++pos_;
      Node n;
      n.kind = NodeKind::star;
      n.left = atom;
      atom = ast_.add(n);
    }
    return atom;
  }

  NodeId parse_atom() {
    char c = src_[pos_];
    if (c == '*') throw SyntaxError(pos_, "dangling '*'");
    if (c == '(') {
      std::size_t open = pos_++;
      NodeId inner = parse_alt();
      if (pos_ >= src_.size() || src_[pos_] != ')') throw SyntaxError(open, "unbalanced '('");
      ++pos_;
      return inner;
    }
    if (c == '\\') {
      if (pos_ + 1 >= src_.size()) throw SyntaxError(pos_, "invalid escape at end of pattern");
      char e = src_[pos_ + 1];
      if (!is_meta(e)) throw SyntaxError(pos_, "invalid escape");
      pos_ += 2;
      return literal(e);
    }
    ++pos_;
    return literal(c);
  }

  NodeId literal(char c) {
    Node n;
    n.kind = NodeKind::literal;
    n.byte = static_cast<std::uint8_t>(c);
    n.position = ++literals_;
    return ast_.add(n);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::int32_t literals_ = 0;
  Ast ast_;
};

void render(const Ast& ast, NodeId id, std::string& out) {
  const Node& n = ast[id];
  switch (n.kind) {
    case NodeKind::epsilon: out += "()"; break;
    case NodeKind::literal: {
      char c = static_cast<char>(n.byte);
      if (is_meta(c)) out += '\\';
      out += c;
      break;
    }
    case NodeKind::beta:
      out += n.beta_eps ? "(<beta" : "<beta";
      out += std::to_string(n.beta_id);
      out += n.beta_eps ? ">|())" : ">";
      break;
    case NodeKind::concat:
      out += '(';
      render(ast, n.left, out);
      render(ast, n.right, out);
      out += ')';
      break;
    case NodeKind::alt:
      out += '(';
      render(ast, n.left, out);
      out += '|';
      render(ast, n.right, out);
      out += ')';
      break;
    case NodeKind::star:
      out += '(';
      render(ast, n.left, out);
      out += ")*";
      break;
    case NodeKind::loop:
      out += '(';
      render(ast, n.left, out);
      out += ")+";
      break;
  }
}

bool same_rec(const Ast& a, NodeId x, const Ast& b, NodeId y) {
  const Node& p = a[x];
  const Node& q = b[y];
  if (p.kind != q.kind) return false;
  switch (p.kind) {
    case NodeKind::epsilon: return true;
    case NodeKind::literal: return p.byte == q.byte && p.position == q.position;
    case NodeKind::beta: return p.beta_id == q.beta_id && p.beta_eps == q.beta_eps;
    case NodeKind::concat:
    case NodeKind::alt: return same_rec(a, p.left, b, q.left) && same_rec(a, p.right, b, q.right);
    case NodeKind::star:
    case NodeKind::loop: return same_rec(a, p.left, b, q.left);
  }
  return false;
}

NodeId copy_rec(const Ast& src, NodeId id, Ast& dst) {
  Node n = src[id];
  if (n.left != kNoNode) n.left = copy_rec(src, n.left, dst);
  if (n.right != kNoNode) n.right = copy_rec(src, n.right, dst);
  return dst.add(n);
}

}  // namespace

Ast parse_pattern(std::string_view pattern) { return Parser(pattern).run(); }

std::size_t literal_count(const Ast& ast) {
  std::size_t count = 0;
  for (NodeId id : preorder(ast))
    if (ast[id].kind == NodeKind::literal) ++count;
  return count;
}

std::string unparse(const Ast& ast) { return unparse(ast, ast.root()); }

std::string unparse(const Ast& ast, NodeId from) {
  std::string out;
  render(ast, from, out);
  return out;
}

bool same_structure(const Ast& a, const Ast& b) { return same_rec(a, a.root(), b, b.root()); }

std::vector<NodeId> preorder(const Ast& ast) {
  std::vector<NodeId> order;
  if (ast.root() == kNoNode) return order;
  std::vector<NodeId> stack{ast.root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const Node& n = ast[id];
    if (n.right != kNoNode) stack.push_back(n.right);
    if (n.left != kNoNode) stack.push_back(n.left);
  }
  return order;
}

bool nullable(const Ast& ast, NodeId id) {
  const Node& n = ast[id];
  switch (n.kind) {
    case NodeKind::epsilon:
    case NodeKind::star: return true;
    case NodeKind::literal: return false;
    case NodeKind::beta: return n.beta_eps;
    case NodeKind::concat: return nullable(ast, n.left) && nullable(ast, n.right);
    case NodeKind::alt: return nullable(ast, n.left) || nullable(ast, n.right);
    case NodeKind::loop: return nullable(ast, n.left);
  }
  return false;
}

Ast subtree(const Ast& ast, NodeId from) {
  Ast out;
  out.set_root(copy_rec(ast, from, out));
  return out;
}

}  // namespace reparse
