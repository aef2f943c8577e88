#include "reparse/generate.hpp"

#include <deque>
#include <limits>
#include <vector>

#include "reparse/syntax.hpp"

namespace reparse {

namespace {

// rng() % n rather than std::uniform_int_distribution: the latter differs
// between standard libraries and seeds must reproduce everywhere.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

void emit(std::mt19937_64& rng, std::size_t literals, std::string_view alphabet, std::string& out) {
  if (literals == 1) {
    out += alphabet[pick(rng, alphabet.size())];
    if (pick(rng, 4) == 0) out += '*';
    return;
  }
  std::size_t left = 1 + pick(rng, literals - 1);
  bool alt = pick(rng, 3) == 0;
  out += '(';
  emit(rng, left, alphabet, out);
  if (alt) out += '|';
  emit(rng, literals - left, alphabet, out);
  out += ')';
  if (pick(rng, 5) == 0) out += '*';
}

}  // namespace

std::string random_pattern(std::mt19937_64& rng, std::size_t literals, std::string_view alphabet) {
  std::string out;
  if (literals > 0) emit(rng, literals, alphabet, out);
  return out;
}

std::string sample_accepted(const Tnfa& a, std::size_t target_len, std::mt19937_64& rng) {
  std::size_t k = a.state_count();

  // States from which some character transition is reachable.
  std::vector<bool> can_grow(k, false);
  std::vector<State> work;
  for (const auto& t : a.transitions())
    if (t.label.kind != LabelKind::eps && !can_grow[t.source]) can_grow[t.source] = true, work.push_back(t.source);
  while (!work.empty()) {
    State u = work.back();
    work.pop_back();
    for (TransitionId id : a.adjacent(u, Direction::backward)) {
      State v = a.transition(id).source;
      if (!can_grow[v]) can_grow[v] = true, work.push_back(v);
    }
  }

  // Fewest characters to the accept state, with the first edge of such a path.
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(k, kFar);
  std::vector<TransitionId> next(k, 0);
  std::deque<State> dq{a.accept()};
  dist[a.accept()] = 0;
  while (!dq.empty()) {
    State u = dq.front();
    dq.pop_front();
    for (TransitionId id : a.adjacent(u, Direction::backward)) {
      const auto& t = a.transition(id);
      std::size_t w = t.label.kind == LabelKind::eps ? 0 : 1;
      if (dist[u] + w < dist[t.source]) {
        dist[t.source] = dist[u] + w;
        next[t.source] = id;
        w ? dq.push_back(t.source) : dq.push_front(t.source);
      }
    }
  }

  std::string out;
  State cur = a.start();
  std::vector<TransitionId> options;
  for (std::size_t steps = 0, cap = 8 * (target_len + k) + 64; out.size() < target_len && steps < cap; ++steps) {
    options.clear();
    for (TransitionId id : a.adjacent(cur, Direction::forward)) {
      const auto& t = a.transition(id);
      if (t.label.kind == LabelKind::character || can_grow[t.target]) options.push_back(id);
    }
    if (options.empty()) break;
    const auto& t = a.transition(options[pick(rng, options.size())]);
    if (t.label.kind == LabelKind::character) out += static_cast<char>(t.label.symbol);
    cur = t.target;
  }
  while (cur != a.accept()) {
    const auto& t = a.transition(next[cur]);
    if (t.label.kind == LabelKind::character) out += static_cast<char>(t.label.symbol);
    cur = t.target;
  }
  return out;
}

std::string perturb(std::string s, std::string_view alphabet, std::mt19937_64& rng) {
  std::size_t edits = 1 + pick(rng, 3);
  for (std::size_t e = 0; e < edits; ++e) {
    char c = alphabet[pick(rng, alphabet.size())];
    std::size_t op = s.empty() ? 1 : pick(rng, 3);
    if (op == 0) {
      s[pick(rng, s.size())] = c;
    } else if (op == 1) {
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(pick(rng, s.size() + 1)), c);
    } else {
      s.erase(s.begin() + static_cast<std::ptrdiff_t>(pick(rng, s.size())));
    }
  }
  return s;
}

Instance gen_instance(std::uint64_t seed, std::size_t m_target, std::size_t n_target) {
  std::mt19937_64 rng(seed);
  Instance inst;
  // The outer star keeps the language infinite so any target length is
  // reachable.
  inst.pattern = "(" + random_pattern(rng, m_target, kDefaultAlphabet) + ")*";
  Tnfa a = build_tnfa(parse_pattern(inst.pattern));
  inst.text = sample_accepted(a, n_target, rng);
  if (pick(rng, 3) == 0) {
    inst.text = perturb(std::move(inst.text), kDefaultAlphabet, rng);
    inst.perturbed = true;
  }
  return inst;
}

}  // namespace reparse
