#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "reparse/automata.hpp"

using namespace reparse;

namespace {

Tnfa tnfa_of(const char* p) { return build_tnfa(parse_pattern(p)); }

StateSet start_set(const Tnfa& a) { return eps_closure(a, singleton(a, a.start())); }

// Reachability over epsilon edges by Floyd-Warshall on a dense matrix.
StateSet closure_oracle(const Tnfa& a, const StateSet& s) {
  std::size_t k = a.state_count();
  std::vector<std::vector<bool>> r(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) r[i][i] = true;
  for (const auto& t : a.transitions())
    if (t.label.kind == LabelKind::eps) r[t.source][t.target] = true;
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t i = 0; i < k; ++i)
      if (r[i][m])
        for (std::size_t j = 0; j < k; ++j)
          if (r[m][j]) r[i][j] = true;
  StateSet out(k);
  for (std::size_t i = 0; i < k; ++i)
    if (s.test(i))
      for (std::size_t j = 0; j < k; ++j)
        if (r[i][j]) out.set(j);
  return out;
}

// States at the end of paths of at most `k` edges that read exactly `c`,
// enumerated layer by layer over (state, consumed) pairs.
StateSet one_char_oracle(const Tnfa& a, const StateSet& s, Symbol c) {
  std::size_t k = a.state_count();
  std::vector<std::pair<State, bool>> layer;
  std::vector<std::vector<bool>> seen(k, std::vector<bool>(2, false));
  for (std::size_t i = 0; i < k; ++i)
    if (s.test(i)) layer.emplace_back(static_cast<State>(i), false), seen[i][0] = true;
  StateSet out(k);
  for (std::size_t depth = 0; depth <= 2 * k + 1 && !layer.empty(); ++depth) {
    std::vector<std::pair<State, bool>> next;
    for (auto [u, consumed] : layer) {
      if (consumed) out.set(u);
      for (const auto& t : a.transitions()) {
        if (t.source != u) continue;
        bool nc = consumed;
        if (t.label.kind != LabelKind::eps) {
          if (consumed || t.label.symbol != c) continue;
          nc = true;
        }
        if (!seen[t.target][nc]) {
          seen[t.target][nc] = true;
          next.emplace_back(t.target, nc);
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

StateSet random_set(std::mt19937_64& rng, std::size_t k) {
  StateSet s(k);
  for (std::size_t i = 0; i < k; ++i)
    if (rng() % 3 == 0) s.set(i);
  return s;
}

}  // namespace

TEST_CASE("build_tnfa: running example accepts aaba, rejects b") {
  Tnfa a = tnfa_of("(a|(ba))*");
  CHECK(accepts(a, "aaba"));
  CHECK(accepts(a, ""));
  CHECK(accepts(a, "a"));
  CHECK(accepts(a, "ba"));
  CHECK(accepts(a, "aba"));
  CHECK_FALSE(accepts(a, "b"));
  CHECK_FALSE(accepts(a, "abb"));
}

TEST_CASE("build_tnfa: epsilon accepts only the empty string") {
  Tnfa a = tnfa_of("");
  CHECK(accepts(a, ""));
  CHECK_FALSE(accepts(a, "a"));
  CHECK(a.state_count() == 2);
}

TEST_CASE("build_tnfa: ab has two character transitions with positions 1 and 2") {
  Tnfa a = tnfa_of("ab");
  int chars = 0;
  for (const auto& t : a.transitions())
    if (t.label.kind == LabelKind::character) {
      ++chars;
      CHECK(t.label.position == chars);
    }
  CHECK(chars == 2);
  CHECK(to_debug_string(a) == "states=3 start=0 accept=2\n0 -> 1 ['a' #1]\n1 -> 2 ['b' #2]\n");
}

TEST_CASE("build_tnfa: golden debug form of (a|(ba))*") {
  CHECK(to_debug_string(tnfa_of("(a|(ba))*")) ==
        "states=9 start=0 accept=8\n"
        "2 -> 3 ['a' #1]\n"
        "4 -> 5 ['b' #2]\n"
        "5 -> 6 ['a' #3]\n"
        "1 -> 2 [eps]\n"
        "3 -> 7 [eps]\n"
        "1 -> 4 [eps]\n"
        "6 -> 7 [eps]\n"
        "0 -> 1 [eps]\n"
        "7 -> 1 [eps]\n"
        "7 -> 8 [eps]\n"
        "0 -> 8 [eps]\n");
}

TEST_CASE("build_tnfa: size bounds, unique positions, fresh start and accept") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Ast ast = parse_pattern(oracle::random_pattern(rng, static_cast<int>(rng() % 20), "abc"));
    Tnfa a = build_tnfa(ast);
    CHECK(a.state_count() <= 2 * ast.size());
    CHECK(a.transitions().size() <= 4 * ast.size());
    std::vector<int> seen(literal_count(ast) + 1, 0);
    for (const auto& t : a.transitions())
      if (t.label.kind == LabelKind::character) ++seen[static_cast<std::size_t>(t.label.position)];
    for (std::size_t p = 1; p < seen.size(); ++p) CHECK(seen[p] == 1);
    CHECK(a.adjacent(a.start(), Direction::backward).empty());
    CHECK(a.adjacent(a.accept(), Direction::forward).empty());
  }
}

TEST_CASE("eps_closure: star accepts empty, empty set stays empty") {
  Tnfa a = tnfa_of("(a|(ba))*");
  CHECK(start_set(a).test(a.accept()));
  StateSet empty(a.state_count());
  CHECK(eps_closure(a, empty).none());
}

TEST_CASE("eps_closure matches Floyd-Warshall reachability and is idempotent") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Tnfa a = build_tnfa(parse_pattern(oracle::random_pattern(rng, 1 + static_cast<int>(rng() % 12), "ab")));
    StateSet s = random_set(rng, a.state_count());
    StateSet c = eps_closure(a, s);
    CHECK(c == closure_oracle(a, s));
    CHECK(eps_closure(a, c) == c);
  }
}

TEST_CASE("step: examples and one-character path oracle") {
  Tnfa a = tnfa_of("(a|(ba))*");
  CHECK(step(a, start_set(a), 'a').test(a.accept()));
  StateSet empty(a.state_count());
  CHECK(step(a, empty, 'a').none());

  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    Tnfa b = build_tnfa(parse_pattern(oracle::random_pattern(rng, 1 + static_cast<int>(rng() % 12), "ab")));
    StateSet s = eps_closure(b, random_set(rng, b.state_count()));
    Symbol c = rng() % 2 ? 'a' : 'b';
    CHECK(step(b, s, c) == one_char_oracle(b, s, c));
  }
}

TEST_CASE("step distributes over union of state-sets") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    Tnfa a = build_tnfa(parse_pattern(oracle::random_pattern(rng, 1 + static_cast<int>(rng() % 12), "ab")));
    StateSet x = eps_closure(a, random_set(rng, a.state_count()));
    StateSet y = eps_closure(a, random_set(rng, a.state_count()));
    StateSet xy = x;
    xy |= y;
    StateSet lhs = step(a, xy, 'a');
    StateSet rhs = step(a, x, 'a');
    rhs |= step(a, y, 'a');
    CHECK(lhs == rhs);
  }
}

TEST_CASE("accepts equals recursive language semantics") {
  std::mt19937_64 rng(17);
  auto strings = oracle::all_strings("ab", 5);
  for (int i = 0; i < 150; ++i) {
    Ast ast = parse_pattern(oracle::random_pattern(rng, static_cast<int>(rng() % 13), "ab"));
    Tnfa a = build_tnfa(ast);
    oracle::LanguageOracle lang(ast);
    for (const auto& s : strings) CHECK(accepts(a, s) == lang.matches(s));
  }
}

TEST_CASE("reverse: involution, reversed language") {
  Tnfa ab = tnfa_of("ab");
  CHECK(accepts(reverse(ab), "ba"));
  CHECK_FALSE(accepts(reverse(ab), "ab"));

  std::mt19937_64 rng(19);
  auto strings = oracle::all_strings("ab", 5);
  for (int i = 0; i < 100; ++i) {
    Tnfa a = build_tnfa(parse_pattern(oracle::random_pattern(rng, static_cast<int>(rng() % 13), "ab")));
    Tnfa r = reverse(a);
    CHECK(to_debug_string(reverse(r)) == to_debug_string(a));
    for (const auto& s : strings) {
      std::string rs(s.rbegin(), s.rend());
      CHECK(accepts(r, rs) == accepts(a, s));
    }
  }
}
