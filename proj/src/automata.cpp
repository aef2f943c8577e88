#include "reparse/automata.hpp"

#include <cstdio>

namespace reparse {

namespace {

TrackingAllocator<std::uint32_t> automata_alloc() { return TrackingAllocator<std::uint32_t>(Category::automata); }

class Builder {
 public:
  Builder(const Ast& ast, tracked_vector<Transition>& ts, tracked_vector<std::pair<State, State>>& bounds,
          NodeEdges* edges)
      : ast_(ast), ts_(ts), bounds_(bounds), edges_(edges) {
    bounds_.assign(ast.size(), {0, 0});
    std::size_t count = 0;
    for (std::size_t id = 0; id < ast.size(); ++id) {
      const Node& n = ast[static_cast<NodeId>(id)];
      switch (n.kind) {
        case NodeKind::epsilon:
        case NodeKind::literal:
        case NodeKind::loop: count += 1; break;
        case NodeKind::beta: count += n.beta_eps ? 2 : 1; break;
        case NodeKind::alt:
        case NodeKind::star: count += 4; break;
        case NodeKind::concat: break;
      }
    }
    ts_.reserve(count);
    if (edges_) {
      std::array<TransitionId, 4> none;
      none.fill(kNoTransition);
      edges_->assign(ast.size(), none);
    }
  }

  std::size_t states() const { return next_; }

  // Builds the node; when `entry` is given it is used as the start state
  // (concatenation identifies the left accept with the right start).
  std::pair<State, State> build(NodeId id, const State* entry) {
    const Node& n = ast_[id];
    std::array<TransitionId, 4> scratch;
    auto& e = edges_ ? (*edges_)[static_cast<std::size_t>(id)] : scratch;
    std::pair<State, State> b;
    switch (n.kind) {
      case NodeKind::epsilon:
      case NodeKind::literal:
      case NodeKind::beta: {
        State s = entry ? *entry : fresh();
        State f = fresh();
        Label l;
        if (n.kind == NodeKind::literal) {
          l = Label{LabelKind::character, n.byte, n.position};
        } else if (n.kind == NodeKind::beta) {
          l = Label{LabelKind::beta, beta_symbol(n.beta_id), 0};
        }
        e[0] = add(s, f, l);
        if (n.kind == NodeKind::beta && n.beta_eps) e[1] = add(s, f, Label{});
        b = {s, f};
        break;
      }
      case NodeKind::concat: {
        auto l = build(n.left, entry);
        auto r = build(n.right, &l.second);
        b = {l.first, r.second};
        break;
      }
      case NodeKind::alt: {
        State s = entry ? *entry : fresh();
        auto l = build(n.left, nullptr);
        auto r = build(n.right, nullptr);
        State f = fresh();
        e[0] = add(s, l.first, Label{});
        e[1] = add(l.second, f, Label{});
        e[2] = add(s, r.first, Label{});
        e[3] = add(r.second, f, Label{});
        b = {s, f};
        break;
      }
      case NodeKind::star: {
        State s = entry ? *entry : fresh();
        auto c = build(n.left, nullptr);
        State f = fresh();
        e[0] = add(s, c.first, Label{});
        e[1] = add(c.second, c.first, Label{});
        e[2] = add(c.second, f, Label{});
        e[3] = add(s, f, Label{});
        b = {s, f};
        break;
      }
      case NodeKind::loop: {
        auto c = build(n.left, entry);
        e[0] = add(c.second, c.first, Label{});
        b = c;
        break;
      }
    }
    bounds_[static_cast<std::size_t>(id)] = b;
    return b;
  }

 private:
  State fresh() { return static_cast<State>(next_++); }
  TransitionId add(State s, State t, Label l) {
    ts_.push_back(Transition{s, t, l});
    return static_cast<TransitionId>(ts_.size() - 1);
  }

  const Ast& ast_;
  tracked_vector<Transition>& ts_;
  tracked_vector<std::pair<State, State>>& bounds_;
  NodeEdges* edges_;
  std::size_t next_ = 0;
};

}  // namespace

Tnfa::Tnfa()
    : transitions_(TrackingAllocator<Transition>(Category::automata)),
      out_offsets_(automata_alloc()),
      out_ids_(automata_alloc()),
      in_offsets_(automata_alloc()),
      in_ids_(automata_alloc()),
      node_bounds_(TrackingAllocator<std::pair<State, State>>(Category::automata)),
      by_position_(automata_alloc()) {}

std::span<const TransitionId> Tnfa::adjacent(State s, Direction d) const {
  const auto& off = d == Direction::forward ? out_offsets_ : in_offsets_;
  const auto& ids = d == Direction::forward ? out_ids_ : in_ids_;
  return std::span<const TransitionId>(ids.data() + off[s], off[s + 1] - off[s]);
}

TransitionId Tnfa::transition_for_position(std::int32_t position) const {
  if (position <= 0 || static_cast<std::size_t>(position) >= by_position_.size()) return kNoTransition;
  return by_position_[static_cast<std::size_t>(position)];
}

void Tnfa::index() {
  auto fill = [&](tracked_vector<std::uint32_t>& off, tracked_vector<TransitionId>& ids, bool by_source) {
    off.assign(state_count_ + 1, 0);
    for (const auto& t : transitions_) ++off[(by_source ? t.source : t.target) + 1];
    for (std::size_t s = 0; s < state_count_; ++s) off[s + 1] += off[s];
    ids.assign(transitions_.size(), 0);
    tracked_vector<std::uint32_t> cursor(off.begin(), off.end() - 1, automata_alloc());
    for (TransitionId i = 0; i < transitions_.size(); ++i) {
      const auto& t = transitions_[i];
      ids[cursor[by_source ? t.source : t.target]++] = i;
    }
  };
  fill(out_offsets_, out_ids_, true);
  fill(in_offsets_, in_ids_, false);

  std::int32_t max_pos = 0;
  for (const auto& t : transitions_)
    if (t.label.kind == LabelKind::character) max_pos = std::max(max_pos, t.label.position);
  by_position_.assign(static_cast<std::size_t>(max_pos) + 1, kNoTransition);
  for (TransitionId i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (t.label.kind == LabelKind::character) by_position_[static_cast<std::size_t>(t.label.position)] = i;
  }
}

Tnfa build_tnfa(const Ast& ast) {
  Tnfa a;
  Builder b(ast, a.transitions_, a.node_bounds_, nullptr);
  auto bounds = b.build(ast.root(), nullptr);
  a.state_count_ = b.states();
  a.start_ = bounds.first;
  a.accept_ = bounds.second;
  a.index();
  return a;
}

NodeEdges node_edges(const Ast& ast) {
  NodeEdges edges(TrackingAllocator<std::array<TransitionId, 4>>(Category::automata));
  auto ts = make_tracked<Transition>(Category::automata);
  auto bounds = tracked_vector<std::pair<State, State>>(TrackingAllocator<std::pair<State, State>>(Category::automata));
  Builder b(ast, ts, bounds, &edges);
  b.build(ast.root(), nullptr);
  return edges;
}

Tnfa make_tnfa(std::size_t states, State start, State accept, std::span<const Transition> ts) {
  Tnfa a;
  a.state_count_ = states;
  a.start_ = start;
  a.accept_ = accept;
  a.transitions_.assign(ts.begin(), ts.end());
  a.index();
  return a;
}

Tnfa reverse(const Tnfa& a) {
  Tnfa r;
  r.state_count_ = a.state_count_;
  r.start_ = a.accept_;
  r.accept_ = a.start_;
  r.transitions_ = a.transitions_;
  for (auto& t : r.transitions_) std::swap(t.source, t.target);
  r.node_bounds_ = a.node_bounds_;
  for (auto& nb : r.node_bounds_) std::swap(nb.first, nb.second);
  r.index();
  return r;
}

void close_in_place(const Tnfa& a, StateSet& s, Direction d, StateStack& stack) {
  stack.clear();
  s.for_each([&](std::size_t i) { stack.push_back(static_cast<State>(i)); });
  while (!stack.empty()) {
    State u = stack.back();
    stack.pop_back();
    for (TransitionId id : a.adjacent(u, d)) {
      const auto& t = a.transition(id);
      if (t.label.kind != LabelKind::eps) continue;
      State v = d == Direction::forward ? t.target : t.source;
      if (s.insert(v)) stack.push_back(v);
    }
  }
}

StateSet eps_closure(const Tnfa& a, const StateSet& s) {
  StateSet out = s;
  StateStack stack = make_stack();
  close_in_place(a, out, Direction::forward, stack);
  return out;
}

void move_in_place(const Tnfa& a, const StateSet& s, Symbol c, Direction d, StateSet& out) {
  out.clear();
  s.for_each([&](std::size_t i) {
    for (TransitionId id : a.adjacent(static_cast<State>(i), d)) {
      const auto& t = a.transition(id);
      if (t.label.consumes(c)) out.set(d == Direction::forward ? t.target : t.source);
    }
  });
}

StateSet step(const Tnfa& a, const StateSet& s, Symbol c) {
  StateSet out(a.state_count());
  move_in_place(a, s, c, Direction::forward, out);
  StateStack stack = make_stack();
  close_in_place(a, out, Direction::forward, stack);
  return out;
}

StateSet singleton(const Tnfa& a, State s) {
  StateSet out(a.state_count());
  out.set(s);
  return out;
}

bool accepts(const Tnfa& a, std::span<const Symbol> q) {
  StateStack stack = make_stack();
  StateSet cur = singleton(a, a.start());
  close_in_place(a, cur, Direction::forward, stack);
  StateSet next(a.state_count());
  for (Symbol c : q) {
    move_in_place(a, cur, c, Direction::forward, next);
    close_in_place(a, next, Direction::forward, stack);
    std::swap(cur, next);
    if (cur.none()) return false;
  }
  return cur.test(a.accept());
}

bool accepts(const Tnfa& a, std::string_view bytes) {
  auto q = to_symbols(bytes);
  return accepts(a, q);
}

std::vector<Symbol> to_symbols(std::string_view bytes) {
  std::vector<Symbol> out;
  out.reserve(bytes.size());
  for (char c : bytes) out.push_back(static_cast<std::uint8_t>(c));
  return out;
}

std::string to_debug_string(const Tnfa& a) {
  std::string out = "states=" + std::to_string(a.state_count()) + " start=" + std::to_string(a.start()) +
                    " accept=" + std::to_string(a.accept()) + "\n";
  for (const auto& t : a.transitions()) {
    out += std::to_string(t.source) + " -> " + std::to_string(t.target) + " [";
    switch (t.label.kind) {
      case LabelKind::eps: out += "eps"; break;
      case LabelKind::beta: out += "beta#" + std::to_string(t.label.symbol - kBetaBase); break;
      case LabelKind::character: {
        auto c = static_cast<unsigned>(t.label.symbol);
        if (c >= 0x21 && c < 0x7F && c != '\'') {
          out += '\'';
          out += static_cast<char>(c);
          out += '\'';
        } else {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02X", c);
          out += buf;
        }
        out += " #" + std::to_string(t.label.position);
        break;
      }
    }
    out += "]\n";
  }
  return out;
}

}  // namespace reparse
