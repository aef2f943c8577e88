#include "reparse/parse_engine.hpp"

#include "reparse/bitparallel.hpp"

#include <limits>

namespace reparse {

namespace {

tracked_vector<Symbol> tracked_symbols(std::string_view bytes) {
  auto out = make_tracked<Symbol>(Category::strings);
  out.reserve(bytes.size());
  for (unsigned char c : bytes) out.push_back(c);
  return out;
}

std::size_t heavy_child(std::span<const std::size_t> lengths) {
  std::size_t heavy = 0;
  for (std::size_t i = 1; i < lengths.size(); ++i)
    if (lengths[i] > lengths[heavy]) heavy = i;
  return heavy;
}

std::size_t split_size_bound(std::size_t k) { return (2 * k + 2) / 3 + 8; }

struct Context {
  const PathBackend& backend;
  const EngineConfig& cfg;
  ParseResult& out;
  StateSet written;
  InvariantMonitor* monitor;
};

// Image of each character of a subproblem string in the original string.
// Stays an implicit shifted identity until a beta is spliced in, so the root
// and the inner pieces hanging off it need no array.
struct Chi {
  tracked_vector<std::uint32_t> map = make_tracked<std::uint32_t>(Category::strings);
  std::uint32_t offset = 0;
  bool identity = true;

  std::uint32_t operator()(std::size_t i) const {
    return identity ? offset + static_cast<std::uint32_t>(i) : map[i];
  }
};

void emit(Context& ctx, const Tnfa& a, const CompressedPath& p, const Chi& chi) {
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Transition& t = a.transition(p.steps[i]);
    std::uint32_t to = chi(i);
    if (to == kNoImage) {
      if (t.label.kind != LabelKind::beta) throw std::logic_error("character transition on a beta position");
      continue;
    }
    if (t.label.kind != LabelKind::character) throw std::logic_error("beta transition on a character position");
    if (ctx.written.test(to) && ctx.monitor) ++ctx.monitor->double_writes;
    ctx.written.set(to);
    ctx.out.positions[to] = t.label.position;
  }
}

// Child 0 is the outer string (outer pieces joined by beta); child i > 0 is
// inner piece i - 1.
std::size_t child_length(const StringDecomposition& sd, std::size_t c) {
  if (c > 0) {
    auto [lo, hi] = sd.inner(c - 1);
    return hi - lo;
  }
  std::size_t len = sd.inner_count();
  for (std::size_t i = 0; i <= sd.inner_count(); ++i) {
    auto [lo, hi] = sd.outer(i);
    len += hi - lo;
  }
  return len;
}

void copy_child(const StringDecomposition& sd, std::size_t c, Symbol beta, std::span<const Symbol> q,
                const Chi& chi, tracked_vector<Symbol>& cq, Chi& cchi) {
  std::size_t len = child_length(sd, c);
  cq.reserve(len);
  if (c > 0) {
    auto [lo, hi] = sd.inner(c - 1);
    cq.assign(q.begin() + static_cast<std::ptrdiff_t>(lo), q.begin() + static_cast<std::ptrdiff_t>(hi));
    if (chi.identity) {
      cchi.offset = chi.offset + static_cast<std::uint32_t>(lo);
      return;
    }
    cchi.identity = false;
    cchi.map.assign(chi.map.begin() + static_cast<std::ptrdiff_t>(lo), chi.map.begin() + static_cast<std::ptrdiff_t>(hi));
    return;
  }
  cchi.identity = false;
  cchi.map.reserve(len);
  for (std::size_t i = 0; i <= sd.inner_count(); ++i) {
    if (i > 0) {
      cq.push_back(beta);
      cchi.map.push_back(kNoImage);
    }
    auto [lo, hi] = sd.outer(i);
    for (std::size_t r = lo; r < hi; ++r) {
      cq.push_back(q[r]);
      cchi.map.push_back(chi(r));
    }
  }
}

// Same as copy_child, but overwrites the parent's buffers from the front.
// Every write index trails the read index, so a forward sweep is safe.
void compact_child(const StringDecomposition& sd, std::size_t c, Symbol beta, tracked_vector<Symbol>& q, Chi& chi) {
  std::size_t w = 0;
  if (c > 0) {
    auto [lo, hi] = sd.inner(c - 1);
    for (std::size_t r = lo; r < hi; ++r, ++w) q[w] = q[r];
    if (chi.identity) {
      chi.offset += static_cast<std::uint32_t>(lo);
    } else {
      for (std::size_t r = lo; r < hi; ++r) chi.map[r - lo] = chi.map[r];
      chi.map.resize(w);
    }
    q.resize(w);
    return;
  }
  if (chi.identity) {
    chi.map.resize(child_length(sd, 0));
    chi.identity = false;
    for (std::size_t i = 0, at = 0; i <= sd.inner_count(); ++i) {
      if (i > 0) chi.map[at++] = kNoImage;
      auto [lo, hi] = sd.outer(i);
      for (std::size_t r = lo; r < hi; ++r) chi.map[at++] = chi.offset + static_cast<std::uint32_t>(r);
    }
  } else {
    for (std::size_t i = 0, at = 0; i <= sd.inner_count(); ++i) {
      if (i > 0) chi.map[at++] = kNoImage;
      auto [lo, hi] = sd.outer(i);
      for (std::size_t r = lo; r < hi; ++r) chi.map[at++] = chi.map[r];
    }
    chi.map.resize(child_length(sd, 0));
  }
  for (std::size_t i = 0; i <= sd.inner_count(); ++i) {
    if (i > 0) q[w++] = beta;
    auto [lo, hi] = sd.outer(i);
    for (std::size_t r = lo; r < hi; ++r) q[w++] = q[r];
  }
  q.resize(w);
}

// Light children borrow their tree from the parent's decomposition; the root
// and every heavy child own theirs. Each node builds its automaton from the
// tree and drops it once the string is split, and the parts keep only their
// trees while the children run.
void solve(Context& ctx, const Ast* borrowed, Ast owned, tracked_vector<Symbol> q, Chi chi, std::size_t depth) {
  InvariantMonitor* mon = ctx.monitor;
  for (;; ++depth) {
    const Ast& tree = borrowed ? *borrowed : owned;
    Tnfa nfa = build_tnfa(tree);
    if (mon) {
      ++mon->nodes;
      mon->max_depth = std::max(mon->max_depth, depth);
    }
    if (ctx.cfg.trace) {
      std::vector<std::uint32_t> images(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) images[i] = chi(i);
      ctx.cfg.trace(TraceEvent{depth, tree, nfa, q, images});
    }

    std::size_t n = q.size(), k = nfa.state_count();
    NodeId inner = kNoNode;
    if (!ctx.backend.is_base(n, k) && k > 2) {
      inner = ctx.cfg.chooser ? ctx.cfg.chooser(tree, depth) : choose_inner(tree);
      if (inner == tree.root()) inner = kNoNode;
      if (inner != kNoNode) {
        // The outer part swaps the subtree for a two-state leaf. A split that
        // does not shrink both parts cannot terminate.
        std::size_t inner_states = subtree_state_counts(tree)[static_cast<std::size_t>(inner)];
        if (inner_states >= k || inner_states <= 2) inner = kNoNode;
      }
    }
    if (inner == kNoNode) {
      if (mon) ++mon->base_cases;
      CompressedPath p = ctx.backend.solve_base(tree, nfa, q);
      emit(ctx, nfa, p, chi);
      return;
    }

    auto [theta, phi] = nfa.node_bounds(inner);
    ValidPairSeq v = ctx.backend.valid_pairs(tree, nfa, theta, phi, q);
    nfa = Tnfa();
    Decomposition d = decompose_parts(tree, inner, static_cast<std::uint32_t>(depth));
    if (!borrowed) owned = Ast();
    if (mon) {
      ++mon->decompositions;
      if (d.outer.nfa.state_count() > split_size_bound(k) || d.inner.nfa.state_count() > split_size_bound(k))
        ++mon->split_size_violations;
    }
    StringDecomposition sd = ctx.backend.finish(v, d, q, mon ? &mon->labels : nullptr);
    v = ValidPairSeq();
    d.outer.nfa = Tnfa();
    d.inner.nfa = Tnfa();
    if (mon) ++mon->string_decompositions;

    std::size_t children = sd.inner_count() + 1;
    std::size_t heavy = 0;
    for (std::size_t c = 1; c < children; ++c)
      if (child_length(sd, c) > child_length(sd, heavy)) heavy = c;

    for (std::size_t c = 0; c < children; ++c) {
      if (c == heavy) continue;
      std::size_t len = child_length(sd, c);
      if (mon) {
        ++mon->light_children;
        if (4 * len > 3 * n + 4) ++mon->light_length_violations;
      }
      auto cq = make_tracked<Symbol>(Category::strings);
      Chi cchi;
      copy_child(sd, c, d.beta, q, chi, cq, cchi);
      solve(ctx, c == 0 ? &d.outer.tree : &d.inner.tree, Ast(), std::move(cq), std::move(cchi), depth + 1);
    }

    // Drop the sibling part before the heavy child's buffers are rewritten.
    Symbol beta = d.beta;
    owned = heavy == 0 ? std::move(d.outer.tree) : std::move(d.inner.tree);
    borrowed = nullptr;
    d = Decomposition();
    compact_child(sd, heavy, beta, q, chi);
  }
}

}  // namespace

std::optional<CompressedPath> naive_parse(const Tnfa& a, std::span<const Symbol> q) {
  std::size_t n = q.size(), k = a.state_count();
  StateStack stack = make_stack();
  // The n+1 stored sets live in one flat word array; per-set vector headers
  // would otherwise dominate for small automata.
  std::size_t stride = (k + 63) / 64;
  auto history = make_tracked<std::uint64_t>(Category::history, (n + 1) * stride, 0);
  auto stored = [&](std::size_t i, State s) { return (history[i * stride + s / 64] >> (s % 64)) & 1U; };
  auto store = [&](std::size_t i, const StateSet& set) {
    std::copy(set.words().begin(), set.words().end(), history.begin() + static_cast<std::ptrdiff_t>(i * stride));
  };
  StateSet now(k), next(k);
  now.set(a.start());
  close_in_place(a, now, Direction::forward, stack);
  store(0, now);
  for (std::size_t i = 0; i < n; ++i) {
    move_in_place(a, now, q[i], Direction::forward, next);
    close_in_place(a, next, Direction::forward, stack);
    store(i + 1, next);
    std::swap(now, next);
  }
  if (!now.test(a.accept())) return std::nullopt;

  CompressedPath p;
  p.steps.resize(n);
  State cur = a.accept();
  StateSet reach(k);
  for (std::size_t i = n; i > 0; --i) {
    reach.clear();
    reach.set(cur);
    close_in_place(a, reach, Direction::backward, stack);
    State best = std::numeric_limits<State>::max();
    TransitionId witness = kNoTransition;
    reach.for_each([&](std::size_t r) {
      for (TransitionId id : a.adjacent(static_cast<State>(r), Direction::backward)) {
        const Transition& t = a.transition(id);
        if (!t.label.consumes(q[i - 1]) || !stored(i - 1, t.source)) continue;
        if (t.source < best || (t.source == best && id < witness)) {
          best = t.source;
          witness = id;
        }
      }
    });
    if (witness == kNoTransition) throw std::logic_error("backward pass lost the accepting path");
    p.steps[i - 1] = witness;
    cur = best;
  }
  return p;
}

std::vector<std::size_t> order_recursion(std::span<const std::size_t> lengths) {
  std::vector<std::size_t> schedule;
  if (lengths.empty()) return schedule;
  std::size_t heavy = heavy_child(lengths);
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (i != heavy) schedule.push_back(i);
  schedule.push_back(heavy);
  return schedule;
}

CompressedPath NaiveBackend::solve_base(const Ast&, const Tnfa& a, std::span<const Symbol> q) const {
  auto p = naive_parse(a, q);
  if (!p) throw std::logic_error("subproblem string rejected by its automaton");
  return std::move(*p);
}

ValidPairSeq NaiveBackend::valid_pairs(const Ast&, const Tnfa& a, State start, State accept,
                                       std::span<const Symbol> q) const {
  return find_valid_pairs(NaiveSim(a), start, accept, q);
}

StringDecomposition NaiveBackend::finish(const ValidPairSeq& v, const Decomposition& d, std::span<const Symbol> q,
                                         LabelCounts* counts) const {
  NaiveSim inner(d.inner.nfa), outer(d.outer.nfa);
  return finish_string(v, inner, outer, d, q, counts);
}

void path(const PathBackend& backend, Automaton a, tracked_vector<Symbol> q, tracked_vector<std::uint32_t> chi,
          const EngineConfig& cfg, ParseResult& out) {
  Context ctx{backend, cfg, out, StateSet(out.positions.size(), Category::bookkeeping), cfg.monitor};
  Chi root;
  if (!chi.empty()) {
    root.map = std::move(chi);
    root.identity = false;
  }
  a.nfa = Tnfa();
  solve(ctx, nullptr, std::move(a.tree), std::move(q), std::move(root), 0);
  if (ctx.written.count() != out.positions.size()) throw std::logic_error("some result slots were never written");
}

bool replay_valid(const Tnfa& a, std::span<const Symbol> q, std::span<const TransitionId> steps) {
  if (steps.size() != q.size()) return false;
  StateStack stack = make_stack();
  StateSet s = singleton(a, a.start());
  close_in_place(a, s, Direction::forward, stack);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (steps[i] >= a.transitions().size()) return false;
    const Transition& t = a.transition(steps[i]);
    if (!t.label.consumes(q[i]) || !s.test(t.source)) return false;
    s.clear();
    s.set(t.target);
    close_in_place(a, s, Direction::forward, stack);
  }
  return s.test(a.accept());
}

bool replay_valid(const Tnfa& a, std::string_view q, std::span<const std::int32_t> positions) {
  std::vector<TransitionId> steps;
  for (std::int32_t p : positions) {
    TransitionId id = a.transition_for_position(p);
    if (id == kNoTransition) return false;
    steps.push_back(id);
  }
  auto sym = to_symbols(q);
  return replay_valid(a, sym, steps);
}

std::optional<Engine> engine_from_name(std::string_view name) {
  if (name == "naive") return Engine::naive;
  if (name == "linear") return Engine::linear;
  if (name == "bitparallel") return Engine::bitparallel;
  return std::nullopt;
}

ParseResult parse(std::string_view pattern, std::string_view q, Engine engine, const ParseOptions& opts) {
  Ast ast = parse_pattern(pattern);
  auto sym = tracked_symbols(q);
  ParseResult r;
  switch (engine) {
    case Engine::naive: {
      Tnfa a = build_tnfa(ast);
      auto p = naive_parse(a, sym);
      if (!p) throw NoMatch();
      r.positions.resize(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) r.positions[i] = a.transition(p->steps[i]).label.position;
      return r;
    }
    case Engine::linear: {
      Automaton a = Automaton::from_tree(std::move(ast));
      if (!accepts(a.nfa, sym)) throw NoMatch();
      auto chi = make_tracked<std::uint32_t>(Category::strings);
      r.positions.resize(q.size());
      NaiveBackend backend(opts.config);
      path(backend, std::move(a), std::move(sym), std::move(chi), opts.config, r);
      return r;
    }
    case Engine::bitparallel: {
      Automaton a = Automaton::from_tree(std::move(ast));
      if (!fast_match(build_micro_forest(a.tree, a.nfa, opts.t), sym)) throw NoMatch();
      auto chi = make_tracked<std::uint32_t>(Category::strings);
      r.positions.resize(q.size());
      FastBackend backend(opts.config, opts.t);
      path(backend, std::move(a), std::move(sym), std::move(chi), opts.config, r);
      return r;
    }
  }
  throw std::logic_error("unknown engine");
}

bool match(std::string_view pattern, std::string_view q, Engine engine, const ParseOptions& opts) {
  Ast ast = parse_pattern(pattern);
  Tnfa a = build_tnfa(ast);
  if (engine != Engine::bitparallel) return accepts(a, q);
  return fast_match(build_micro_forest(ast, a, opts.t), tracked_symbols(q));
}

}  // namespace reparse
