#include "reparse/bitparallel.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "reparse/syntax.hpp"

namespace reparse {

namespace {

std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

struct Edge {
  std::uint8_t from, to;
  bool consuming;
};

class Decoder {
 public:
  explicit Decoder(std::string_view enc) : enc_(enc) {}

  std::vector<Edge> run() {
    walk(0, 1);
    if (pos_ != enc_.size()) fail("trailing tokens");
    return std::move(edges_);
  }
  std::size_t states() const { return next_; }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw std::invalid_argument(std::string("bad micro encoding: ") + what);
  }

  char token() {
    if (pos_ >= enc_.size()) fail("truncated");
    return enc_[pos_++];
  }

  void walk(std::uint8_t src, std::uint8_t snk) {
    switch (token()) {
      case 'S': {
        if (next_ >= kMaxMicroStates) fail("too many states");
        auto mid = static_cast<std::uint8_t>(next_++);
        walk(src, mid);
        walk(mid, snk);
        break;
      }
      case 'P':
        walk(src, snk);
        walk(src, snk);
        break;
      case 'e': edges_.push_back({src, snk, false}); break;
      case 'r': edges_.push_back({snk, src, false}); break;
      case 'c': edges_.push_back({src, snk, true}); break;
      case 'p': {
        char f = token();
        if (f < '0' || f > '3') fail("bad collapsed-child flags");
        if ((f - '0') & 1) edges_.push_back({src, snk, false});
        if ((f - '0') & 2) edges_.push_back({snk, src, false});
        break;
      }
      default: fail("unknown token");
    }
  }

  std::string_view enc_;
  std::size_t pos_ = 0;
  std::size_t next_ = 2;
  std::vector<Edge> edges_;
};

}  // namespace

std::unique_ptr<MicroShape> decode_micro(std::string_view encoding) {
  Decoder dec(encoding);
  std::vector<Edge> edges = dec.run();
  std::size_t k = dec.states();

  constexpr std::uint8_t kNone = 0xFF;
  std::vector<std::uint8_t> cin(k, kNone), cout(k, kNone);
  for (const Edge& e : edges) {
    if (!e.consuming) continue;
    if (cout[e.from] != kNone || cin[e.to] != kNone)
      throw std::invalid_argument("bad micro encoding: state with two consuming transitions");
    cout[e.from] = e.to;
    cin[e.to] = e.from;
  }

  auto shape = std::make_unique<MicroShape>();
  shape->encoding = std::string(encoding);
  shape->states = static_cast<std::uint8_t>(k);
  shape->renumber.assign(k, kNone);
  std::size_t next = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (cin[i] != kNone) continue;
    for (std::size_t j = i; j != kNone; j = cout[j]) shape->renumber[j] = static_cast<std::uint8_t>(next++);
  }
  if (next != k) throw std::invalid_argument("bad micro encoding: consuming cycle");

  for (const Edge& e : edges) {
    std::uint8_t a = shape->renumber[e.from], b = shape->renumber[e.to];
    if (e.consuming) {
      shape->consuming_from |= bit(a);
    } else {
      shape->eps_out[a] |= bit(b);
      shape->eps_in[b] |= bit(a);
    }
  }
  return shape;
}

Tnfa micro_tnfa(const MicroShape& shape) {
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < shape.states; ++i) {
    if (shape.consuming_from & bit(i))
      ts.push_back({static_cast<State>(i), static_cast<State>(i + 1), Label{LabelKind::character, 0, 0}});
    for (std::uint64_t m = shape.eps_out[i]; m; m &= m - 1)
      ts.push_back({static_cast<State>(i), static_cast<State>(std::countr_zero(m)), Label{}});
  }
  return make_tnfa(shape.states, shape.renumber[0], shape.renumber[1], ts);
}

ClosureTable& ClosureTable::shared() {
  static ClosureTable table;
  return table;
}

const MicroShape* ClosureTable::intern(std::string_view encoding) {
  std::string key(encoding);
  {
    std::shared_lock lock(mutex_);
    auto it = shapes_.find(key);
    if (it != shapes_.end()) return it->second.get();
  }
  auto shape = decode_micro(encoding);
  std::unique_lock lock(mutex_);
  auto [it, fresh] = shapes_.try_emplace(std::move(key), std::move(shape));
  if (fresh) memo_[it->second.get()];
  return it->second.get();
}

std::uint64_t ClosureTable::close(const MicroShape* shape, std::uint64_t set, Direction d) {
  auto dir = static_cast<std::size_t>(d);
  {
    std::shared_lock lock(mutex_);
    const auto& memo = memo_.find(shape)->second.by_dir[dir];
    auto it = memo.find(set);
    if (it != memo.end()) return it->second;
  }
  const std::uint64_t* adj = d == Direction::forward ? shape->eps_out : shape->eps_in;
  std::uint64_t closed = set, frontier = set;
  while (frontier) {
    std::uint64_t add = adj[std::countr_zero(frontier)] & ~closed;
    frontier &= frontier - 1;
    closed |= add;
    frontier |= add;
  }
  std::unique_lock lock(mutex_);
  memo_[shape].by_dir[dir].emplace(set, closed);
  return closed;
}

std::size_t ClosureTable::shapes() const {
  std::shared_lock lock(mutex_);
  return shapes_.size();
}

std::size_t ClosureTable::entries() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [shape, memo] : memo_) n += memo.by_dir[0].size() + memo.by_dir[1].size();
  return n;
}

namespace {

enum class SpKind : std::uint8_t { leaf, series, parallel };

struct SpNode {
  SpKind kind = SpKind::leaf;
  char token = 'e';  // leaves: 'e', 'r' or 'c'
  std::uint8_t eps = 0;  // bit 0: epsilon path source to sink; bit 1: the reverse
  bool cut = false;
  TransitionId tid = kNoTransition;
  std::uint32_t left = 0, right = 0;
  State src = 0, snk = 0;
  std::size_t size = 2;  // states of the piece with cut children collapsed
};

class SpBuilder {
 public:
  SpBuilder(const Ast& tree, const Tnfa& a) : tree_(tree), a_(a), edges_(node_edges(tree)) {}

  std::uint32_t build(NodeId id) {
    const Node& n = tree_[id];
    const auto& e = edges_[static_cast<std::size_t>(id)];
    switch (n.kind) {
      case NodeKind::epsilon:
      case NodeKind::literal: return leaf(e[0], false);
      case NodeKind::beta: {
        std::uint32_t b = leaf(e[0], false);
        return n.beta_eps ? parallel(b, leaf(e[1], false)) : b;
      }
      case NodeKind::concat: {
        std::uint32_t l = build(n.left);
        return series(l, build(n.right));
      }
      case NodeKind::alt: {
        std::uint32_t l = series(series(leaf(e[0], false), build(n.left)), leaf(e[1], false));
        std::uint32_t r = series(series(leaf(e[2], false), build(n.right)), leaf(e[3], false));
        return parallel(l, r);
      }
      case NodeKind::star: {
        std::uint32_t body = parallel(build(n.left), leaf(e[1], true));
        return parallel(series(series(leaf(e[0], false), body), leaf(e[2], false)), leaf(e[3], false));
      }
      case NodeKind::loop: return parallel(build(n.left), leaf(e[0], true));
    }
    throw std::logic_error("unknown node kind");
  }

  std::vector<SpNode>& nodes() { return nodes_; }

 private:
  std::uint32_t add(SpNode n) {
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::uint32_t leaf(TransitionId id, bool back) {
    const Transition& t = a_.transition(id);
    SpNode n;
    n.tid = id;
    if (t.label.kind != LabelKind::eps) {
      n.token = 'c';
    } else {
      n.token = back ? 'r' : 'e';
      n.eps = back ? 2 : 1;
    }
    n.src = back ? t.target : t.source;
    n.snk = back ? t.source : t.target;
    return add(n);
  }

  std::uint32_t series(std::uint32_t x, std::uint32_t y) {
    if (nodes_[x].snk != nodes_[y].src) throw std::logic_error("series parts do not meet");
    SpNode n;
    n.kind = SpKind::series;
    n.left = x;
    n.right = y;
    n.src = nodes_[x].src;
    n.snk = nodes_[y].snk;
    n.eps = nodes_[x].eps & nodes_[y].eps;
    return add(n);
  }

  std::uint32_t parallel(std::uint32_t x, std::uint32_t y) {
    if (nodes_[x].src != nodes_[y].src || nodes_[x].snk != nodes_[y].snk)
      throw std::logic_error("parallel parts do not share terminals");
    SpNode n;
    n.kind = SpKind::parallel;
    n.left = x;
    n.right = y;
    n.src = nodes_[x].src;
    n.snk = nodes_[x].snk;
    n.eps = nodes_[x].eps | nodes_[y].eps;
    return add(n);
  }

  const Ast& tree_;
  const Tnfa& a_;
  NodeEdges edges_;
  std::vector<SpNode> nodes_;
};

// Children are built before parents, so index order is a postorder.
void choose_cuts(std::vector<SpNode>& sp, std::size_t t) {
  for (auto& n : sp) {
    if (n.kind == SpKind::leaf) continue;
    SpNode& x = sp[n.left];
    SpNode& y = sp[n.right];
    std::size_t shared = n.kind == SpKind::series ? 1 : 2;
    auto total = [&] { return (x.cut ? 2 : x.size) + (y.cut ? 2 : y.size) - shared; };
    if (total() > t) (y.size > x.size ? y : x).cut = true;
    if (total() > t) (x.cut ? y : x).cut = true;
    n.size = total();
  }
}

class ForestAssembler {
 public:
  ForestAssembler(const std::vector<SpNode>& sp, MicroForest& f) : sp_(sp), f_(f) {}

  void micro(std::uint32_t root, std::uint32_t parent, std::uint8_t parent_src, std::uint8_t parent_snk) {
    // Walk the piece in the same order as the decoder.
    encoding_.clear();
    walk_globals_.assign({sp_[root].src, sp_[root].snk});
    consuming_.clear();
    pending_.clear();
    walk(root, 0, 1, true);

    const MicroShape* shape = f_.table->intern(encoding_);
    auto id = static_cast<std::uint32_t>(f_.micros.size());
    Micro m;
    m.shape = shape;
    m.parent = parent == kRoot ? id : parent;
    m.in_parent[0] = parent_src;
    m.in_parent[1] = parent_snk;
    m.terminal[0] = shape->renumber[0];
    m.terminal[1] = shape->renumber[1];
    m.local_begin = static_cast<std::uint32_t>(f_.globals.size());
    f_.globals.resize(f_.globals.size() + shape->states);
    f_.consuming.resize(f_.consuming.size() + shape->states, kNoTransition);
    for (std::size_t w = 0; w < walk_globals_.size(); ++w) f_.globals[m.local_begin + shape->renumber[w]] = walk_globals_[w];
    for (auto [w, tid] : consuming_) f_.consuming[m.local_begin + shape->renumber[w]] = tid;

    // Reserve this micro's child slots before the children number themselves.
    m.first_child = static_cast<std::uint32_t>(f_.children.size());
    m.child_end = m.first_child + static_cast<std::uint32_t>(pending_.size());
    f_.children.resize(m.child_end);
    f_.micros.push_back(m);

    std::vector<Pending> kids;
    kids.swap(pending_);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      f_.children[m.first_child + i] = static_cast<std::uint32_t>(f_.micros.size());
      micro(kids[i].node, id, shape->renumber[kids[i].src], shape->renumber[kids[i].snk]);
    }
  }

  static constexpr std::uint32_t kRoot = 0xFFFFFFFFu;

 private:
  struct Pending {
    std::uint32_t node;
    std::uint8_t src, snk;
  };

  void walk(std::uint32_t id, std::uint8_t src, std::uint8_t snk, bool top) {
    const SpNode& n = sp_[id];
    if (n.cut && !top) {
      encoding_ += 'p';
      encoding_ += static_cast<char>('0' + n.eps);
      pending_.push_back({id, src, snk});
      return;
    }
    switch (n.kind) {
      case SpKind::leaf:
        encoding_ += n.token;
        if (n.token == 'c') consuming_.emplace_back(src, n.tid);
        break;
      case SpKind::series: {
        encoding_ += 'S';
        auto mid = static_cast<std::uint8_t>(walk_globals_.size());
        walk_globals_.push_back(sp_[n.left].snk);
        walk(n.left, src, mid, false);
        walk(n.right, mid, snk, false);
        break;
      }
      case SpKind::parallel:
        encoding_ += 'P';
        walk(n.left, src, snk, false);
        walk(n.right, src, snk, false);
        break;
    }
  }

  const std::vector<SpNode>& sp_;
  MicroForest& f_;
  std::string encoding_;
  std::vector<State> walk_globals_;
  std::vector<std::pair<std::uint8_t, TransitionId>> consuming_;
  std::vector<Pending> pending_;
};

}  // namespace

MicroForest build_micro_forest(const Ast& tree, const Tnfa& a, std::size_t t, ClosureTable& table) {
  if (t < 3 || t > kMaxMicroStates) throw std::invalid_argument("micro size t must be in 3..63");
  MicroForest f;
  f.t = t;
  f.start = a.start();
  f.accept = a.accept();
  f.state_count = a.state_count();
  f.table = &table;
  {
    SpBuilder b(tree, a);
    std::uint32_t root = b.build(tree.root());
    auto& sp = b.nodes();
    choose_cuts(sp, t);
    ForestAssembler(sp, f).micro(root, ForestAssembler::kRoot, 0, 0);
  }

  // Symbol dictionary.
  std::size_t max_symbol = 255;
  for (const auto& tr : a.transitions())
    if (tr.label.kind != LabelKind::eps) max_symbol = std::max<std::size_t>(max_symbol, tr.label.symbol);
  f.dict_offsets.assign(max_symbol + 2, 0);
  std::vector<std::pair<Symbol, std::uint64_t>> local;
  auto for_each_entry = [&](auto&& sink) {
    for (std::uint32_t m = 0; m < f.size(); ++m) {
      const Micro& mi = f.micros[m];
      local.clear();
      for (std::size_t i = 0; i < mi.shape->states; ++i) {
        TransitionId tid = f.consuming[mi.local_begin + i];
        if (tid == kNoTransition) continue;
        Symbol c = a.transition(tid).label.symbol;
        auto it = std::find_if(local.begin(), local.end(), [&](const auto& p) { return p.first == c; });
        if (it == local.end()) local.emplace_back(c, 0), it = local.end() - 1;
        it->second |= bit(i + 1);
      }
      for (auto [c, mask] : local) sink(c, m, mask);
    }
  };
  for_each_entry([&](Symbol c, std::uint32_t, std::uint64_t) { ++f.dict_offsets[c + 1]; });
  for (std::size_t c = 1; c < f.dict_offsets.size(); ++c) f.dict_offsets[c] += f.dict_offsets[c - 1];
  f.dict_micro.resize(f.dict_offsets.back());
  f.dict_mask.resize(f.dict_offsets.back());
  {
    std::vector<std::uint32_t> fill(f.dict_offsets.begin(), f.dict_offsets.end() - 1);
    for_each_entry([&](Symbol c, std::uint32_t m, std::uint64_t mask) {
      f.dict_micro[fill[c]] = m;
      f.dict_mask[fill[c]++] = mask;
    });
  }

  // Copies of each state.
  f.copy_offsets.assign(f.state_count + 1, 0);
  for (State g : f.globals) ++f.copy_offsets[g + 1];
  for (std::size_t q = 1; q < f.copy_offsets.size(); ++q) f.copy_offsets[q] += f.copy_offsets[q - 1];
  f.copy_micro.resize(f.globals.size());
  f.copy_bit.resize(f.globals.size());
  {
    std::vector<std::uint32_t> fill(f.copy_offsets.begin(), f.copy_offsets.end() - 1);
    for (std::uint32_t m = 0; m < f.size(); ++m) {
      const Micro& mi = f.micros[m];
      for (std::uint8_t i = 0; i < mi.shape->states; ++i) {
        State g = f.globals[mi.local_begin + i];
        f.copy_micro[fill[g]] = m;
        f.copy_bit[fill[g]++] = i;
      }
    }
  }
  return f;
}

bool FastSim::contains(const Set& s, State q) const {
  for (std::uint32_t c = f_->copy_offsets[q]; c < f_->copy_offsets[q + 1]; ++c)
    if (s[f_->copy_micro[c]] & bit(f_->copy_bit[c])) return true;
  return false;
}

void FastSim::insert(Set& s, State q) const {
  for (std::uint32_t c = f_->copy_offsets[q]; c < f_->copy_offsets[q + 1]; ++c)
    s[f_->copy_micro[c]] |= bit(f_->copy_bit[c]);
}

void FastSim::move(Set& s, Symbol c, Direction d) const {
  std::uint32_t e = 0, end = 0;
  if (static_cast<std::size_t>(c) + 1 < f_->dict_offsets.size()) {
    e = f_->dict_offsets[c];
    end = f_->dict_offsets[c + 1];
  }
  for (std::uint32_t m = 0; m < s.size(); ++m) {
    if (e < end && f_->dict_micro[e] == m) {
      std::uint64_t mask = f_->dict_mask[e++];
      s[m] = d == Direction::forward ? (s[m] << 1) & mask : (s[m] & mask) >> 1;
    } else {
      s[m] = 0;
    }
  }
}

void FastSim::pass(Set& s, std::uint32_t m, Direction d) const {
  const Micro& mi = f_->micros[m];
  ClosureTable& table = *f_->table;
  s[m] = table.close(mi.shape, s[m], d);
  std::uint32_t count = mi.child_end - mi.first_child;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t c = f_->children[d == Direction::forward ? mi.first_child + i : mi.child_end - 1 - i];
    const Micro& ci = f_->micros[c];
    for (int j = 0; j < 2; ++j)
      if (s[m] & bit(ci.in_parent[j])) s[c] |= bit(ci.terminal[j]);
    pass(s, c, d);
    std::uint64_t before = s[m];
    for (int j = 0; j < 2; ++j)
      if (s[c] & bit(ci.terminal[j])) s[m] |= bit(ci.in_parent[j]);
    if (s[m] != before) s[m] = table.close(mi.shape, s[m], d);
  }
}

// Micros are in preorder, so parents precede children.
void FastSim::align(Set& s) const {
  for (std::size_t m = s.size(); m-- > 1;) {
    const Micro& mi = f_->micros[m];
    for (int j = 0; j < 2; ++j)
      if (s[m] & bit(mi.terminal[j])) s[mi.parent] |= bit(mi.in_parent[j]);
  }
  for (std::size_t m = 1; m < s.size(); ++m) {
    const Micro& mi = f_->micros[m];
    for (int j = 0; j < 2; ++j)
      if (s[mi.parent] & bit(mi.in_parent[j])) s[m] |= bit(mi.terminal[j]);
  }
}

void FastSim::close(Set& s, Direction d) const {
  if (s.empty()) return;
  pass(s, 0, d);
  pass(s, 0, d);
  align(s);
  if (third_) {
    Set check = s;
    pass(check, 0, d);
    align(check);
    if (check != s) ++*third_;
  }
}

void FastSim::advance(Set& s, Symbol c, Direction d) const {
  move(s, c, d);
  close(s, d);
}

StateSet FastSim::to_global(const Set& s) const {
  StateSet g(f_->state_count);
  for (std::uint32_t m = 0; m < s.size(); ++m) {
    std::uint32_t base = f_->micros[m].local_begin;
    for (std::uint64_t w = s[m]; w; w &= w - 1) g.set(f_->globals[base + std::countr_zero(w)]);
  }
  return g;
}

ForestSet FastSim::from_global(const StateSet& g) const {
  Set s = make();
  g.for_each([&](std::size_t q) { insert(s, static_cast<State>(q)); });
  return s;
}

StateSet fast_step(const MicroForest& f, const StateSet& s, Symbol c, Direction d) {
  FastSim sim(f);
  ForestSet set = sim.from_global(s);
  sim.advance(set, c, d);
  return sim.to_global(set);
}

bool fast_match(const MicroForest& f, std::span<const Symbol> q) {
  FastSim sim(f);
  ForestSet s = sim.make();
  sim.insert(s, f.start);
  sim.close(s, Direction::forward);
  for (Symbol c : q) sim.advance(s, c, Direction::forward);
  return sim.contains(s, f.accept);
}

std::optional<CompressedPath> fast_parse_base(const MicroForest& f, std::span<const Symbol> q,
                                              std::size_t* third_pass_changes) {
  FastSim sim(f, third_pass_changes);
  std::size_t n = q.size(), words = f.size();
  auto history = make_tracked<std::uint64_t>(Category::history, (n + 1) * words, 0);
  ForestSet s = sim.make();
  sim.insert(s, f.start);
  sim.close(s, Direction::forward);
  std::copy(s.begin(), s.end(), history.begin());
  for (std::size_t i = 0; i < n; ++i) {
    sim.advance(s, q[i], Direction::forward);
    std::copy(s.begin(), s.end(), history.begin() + static_cast<std::ptrdiff_t>((i + 1) * words));
  }
  if (!sim.contains(s, f.accept)) return std::nullopt;

  CompressedPath p;
  p.steps.resize(n);
  State cur = f.accept;
  for (std::size_t i = n; i > 0; --i) {
    sim.clear(s);
    sim.insert(s, cur);
    sim.close(s, Direction::backward);
    sim.move(s, q[i - 1], Direction::backward);
    const std::uint64_t* before = history.data() + (i - 1) * words;
    std::size_t m = 0;
    while (m < words && (s[m] & before[m]) == 0) ++m;
    if (m == words) throw std::logic_error("backward pass lost the accepting path");
    std::size_t local = f.micros[m].local_begin + static_cast<std::size_t>(std::countr_zero(s[m] & before[m]));
    p.steps[i - 1] = f.consuming[local];
    cur = f.globals[local];
  }
  return p;
}

CompressedPath FastBackend::solve_base(const Ast& tree, const Tnfa& a, std::span<const Symbol> q) const {
  auto p = fast_parse_base(build_micro_forest(tree, a, t_), q, third());
  if (!p) throw std::logic_error("subproblem string rejected by its automaton");
  return std::move(*p);
}

ValidPairSeq FastBackend::valid_pairs(const Ast& tree, const Tnfa& a, State start, State accept,
                                      std::span<const Symbol> q) const {
  MicroForest f = build_micro_forest(tree, a, t_);
  return find_valid_pairs(FastSim(f, third()), start, accept, q);
}

StringDecomposition FastBackend::finish(const ValidPairSeq& v, const Decomposition& d, std::span<const Symbol> q,
                                        LabelCounts* counts) const {
  MicroForest fi = build_micro_forest(d.inner.tree, d.inner.nfa, t_);
  MicroForest fo = build_micro_forest(d.outer.tree, d.outer.nfa, t_);
  return finish_string(v, FastSim(fi, third()), FastSim(fo, third()), d, q, counts);
}

ParseResult fast_parse(std::string_view pattern, std::string_view q, std::size_t t) {
  ParseOptions o;
  o.t = t;
  return parse(pattern, q, Engine::bitparallel, o);
}

}  // namespace reparse
