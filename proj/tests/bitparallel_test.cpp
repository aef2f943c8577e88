#include <doctest.h>

#include <random>
#include <thread>

#include "oracles.hpp"
#include "reparse/bitparallel.hpp"
#include "reparse/generate.hpp"

using namespace reparse;

namespace {

struct Built {
  Ast ast;
  Tnfa a;
  explicit Built(std::string_view pattern) : ast(parse_pattern(pattern)), a(build_tnfa(ast)) {}
};

StateSet closed(const Tnfa& a, StateSet s, Direction d) {
  StateStack stack = make_stack();
  close_in_place(a, s, d, stack);
  return s;
}

std::vector<std::int32_t> positions(const Tnfa& a, const CompressedPath& p) {
  std::vector<std::int32_t> out;
  for (TransitionId id : p.steps) out.push_back(a.transition(id).label.position);
  return out;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("decode_micro: walk numbering and consuming chains") {
  // a*: P(S(S(e, P(c, r)), e), e)
  auto s = decode_micro("PSSePcree");
  CHECK(s->states == 4);
  CHECK(std::popcount(s->consuming_from) == 1);
  std::size_t from = static_cast<std::size_t>(std::countr_zero(s->consuming_from));
  // The consuming transition runs into the next local state; the back edge
  // returns from there to its source.
  CHECK((s->eps_out[from + 1] >> from & 1U) == 1U);

  auto chain = decode_micro("SSccc");
  CHECK(chain->states == 4);
  CHECK(chain->consuming_from == 0b0111);

  CHECK_THROWS_AS(decode_micro("S"), std::invalid_argument);
  CHECK_THROWS_AS(decode_micro("ee"), std::invalid_argument);
  CHECK_THROWS_AS(decode_micro("p7"), std::invalid_argument);
  CHECK_THROWS_AS(decode_micro("x"), std::invalid_argument);
  std::string deep(70, 'S');
  deep += std::string(71, 'c');
  CHECK_THROWS_AS(decode_micro(deep), std::invalid_argument);
}

TEST_CASE("build_micro_forest: t >= k gives a single micro equal to the automaton") {
  Built b("(a|(ba))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 63);
  REQUIRE(f.size() == 1);
  CHECK(f.micros[0].shape->states == b.a.state_count());
  StateSet all(b.a.state_count());
  for (State g : f.globals) all.set(g);
  CHECK(all.count() == b.a.state_count());
}

TEST_CASE("build_micro_forest: running example with t = 4") {
  Built b("(a|(ba))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 4);
  CHECK(f.size() >= 2);
  for (const Micro& m : f.micros) CHECK(m.shape->states <= 4);
  oracle::LanguageOracle lang(b.ast);
  for (const std::string& q : oracle::all_strings("ab", 5)) CHECK(fast_match(f, to_symbols(q)) == lang.matches(q));
}

TEST_CASE("build_micro_forest: t below 3 is rejected") {
  Built b("ab");
  CHECK_THROWS_AS(build_micro_forest(b.ast, b.a, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_micro_forest(b.ast, b.a, 64), std::invalid_argument);
}

TEST_CASE("build_micro_forest: random patterns keep micros small and few") {
  std::mt19937_64 rng(71);
  for (int iter = 0; iter < 100; ++iter) {
    Built b(random_pattern(rng, 1 + rng() % 40, "abc"));
    std::size_t t = 3 + rng() % 30;
    MicroForest f = build_micro_forest(b.ast, b.a, t);
    for (std::size_t m = 0; m < f.size(); ++m) {
      const Micro& mi = f.micros[m];
      CHECK(mi.shape->states <= t);
      if (m > 0) CHECK(mi.parent < m);
    }
    CHECK(f.size() <= 4 * ceil_div(b.a.state_count(), t));
    // Every state has at least one copy and every transition lives somewhere.
    for (State q = 0; q < b.a.state_count(); ++q) CHECK(f.copy_offsets[q + 1] > f.copy_offsets[q]);
  }
}

TEST_CASE("fast_step: single micro is identical to step") {
  Built b("(a|(ba))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 63);
  StateSet s = closed(b.a, singleton(b.a, b.a.start()), Direction::forward);
  for (char c : std::string("abab")) {
    StateSet next = step(b.a, s, static_cast<Symbol>(c));
    CHECK(fast_step(f, s, static_cast<Symbol>(c)) == next);
    s = next;
  }
}

TEST_CASE("fast_step: empty set stays empty") {
  Built b("(a|b)*c");
  MicroForest f = build_micro_forest(b.ast, b.a, 3);
  StateSet none(b.a.state_count());
  CHECK(fast_step(f, none, 'a').none());
  CHECK(fast_step(f, none, 'a', Direction::backward).none());
}

TEST_CASE("fast_step: random instances match step in both directions") {
  std::mt19937_64 rng(73);
  std::size_t third = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Built b(random_pattern(rng, 1 + rng() % 25, "ab"));
    Tnfa rev = reverse(b.a);
    std::size_t t = 3 + rng() % 6;
    MicroForest f = build_micro_forest(b.ast, b.a, t);
    FastSim sim(f, &third);

    StateSet fw = closed(b.a, singleton(b.a, b.a.start()), Direction::forward);
    StateSet bw = closed(b.a, singleton(b.a, b.a.accept()), Direction::backward);
    for (int i = 0; i < 10; ++i) {
      auto c = static_cast<Symbol>('a' + rng() % 2);
      StateSet want = step(b.a, fw, c);
      CHECK(fast_step(f, fw, c) == want);
      fw = want.any() ? want : closed(b.a, singleton(b.a, b.a.start()), Direction::forward);

      StateSet want_back = step(rev, bw, c);
      CHECK(fast_step(f, bw, c, Direction::backward) == want_back);
      bw = want_back.any() ? want_back : closed(b.a, singleton(b.a, b.a.accept()), Direction::backward);
    }
    // Closure of arbitrary sets, not only reachable ones.
    StateSet any(b.a.state_count());
    for (State q = 0; q < b.a.state_count(); ++q)
      if (rng() % 4 == 0) any.set(q);
    for (Direction d : {Direction::forward, Direction::backward}) {
      ForestSet s = sim.from_global(any);
      sim.close(s, d);
      CHECK(sim.to_global(s) == closed(b.a, any, d));
    }
  }
  CHECK(third == 0);
}

TEST_CASE("fast_match: examples and random agreement with accepts") {
  Built b("(a|(ba))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 32);
  CHECK(fast_match(f, to_symbols("aaba")));
  CHECK_FALSE(fast_match(f, to_symbols("b")));

  std::mt19937_64 rng(79);
  for (int iter = 0; iter < 500; ++iter) {
    Built r(random_pattern(rng, 1 + rng() % 20, "abc"));
    std::string q = sample_accepted(r.a, rng() % 30, rng);
    if (rng() % 2) q = perturb(q, "abc", rng);
    MicroForest rf = build_micro_forest(r.ast, r.a, 3 + rng() % 30);
    CHECK(fast_match(rf, to_symbols(q)) == accepts(r.a, q));
  }
}

TEST_CASE("fast_parse_base: empty string, running example, random cases") {
  Built b("(a|(ba))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 32);
  auto empty = fast_parse_base(f, {});
  REQUIRE(empty);
  CHECK(empty->steps.empty());
  auto p = fast_parse_base(f, to_symbols("aaba"));
  REQUIRE(p);
  CHECK(positions(b.a, *p) == std::vector<std::int32_t>{1, 1, 2, 3});
  CHECK_FALSE(fast_parse_base(f, to_symbols("b")));

  std::mt19937_64 rng(83);
  std::size_t third = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Built r(random_pattern(rng, 1 + rng() % 15, "ab"));
    std::string q = sample_accepted(r.a, rng() % 12, rng);
    if (rng() % 3 == 0) q = perturb(q, "ab", rng);
    MicroForest rf = build_micro_forest(r.ast, r.a, 3 + rng() % 6);
    auto sym = to_symbols(q);
    auto rp = fast_parse_base(rf, sym, &third);
    CHECK(rp.has_value() == accepts(r.a, q));
    if (rp) CHECK(replay_valid(r.a, sym, rp->steps));
  }
  CHECK(third == 0);
}

TEST_CASE("fast_parse: examples") {
  CHECK(fast_parse("", "", 32).positions.empty());
  ParseResult r = fast_parse("(a|(ba))*", "aaba", 32);
  CHECK(std::vector<std::int32_t>(r.positions.begin(), r.positions.end()) == std::vector<std::int32_t>{1, 1, 2, 3});
  CHECK_THROWS_AS(fast_parse("(a|(ba))*", "b", 32), NoMatch);
  CHECK_THROWS_AS(fast_parse("(", "", 32), SyntaxError);
}

TEST_CASE("fast_parse: agrees with the linear engine and recurses cleanly") {
  std::mt19937_64 rng(89);
  InvariantMonitor mon;
  std::size_t matched = 0;
  for (int iter = 0; iter < 500; ++iter) {
    std::string pattern = random_pattern(rng, 1 + rng() % 30, "abc");
    Tnfa a = build_tnfa(parse_pattern(pattern));
    std::string q = sample_accepted(a, rng() % 60, rng);
    if (rng() % 3 == 0) q = perturb(q, "abc", rng);
    ParseOptions o;
    o.t = 3 + rng() % 6;
    o.config.monitor = &mon;
    bool linear = match(pattern, q, Engine::linear);
    CHECK(match(pattern, q, Engine::bitparallel, o) == linear);
    if (!linear) {
      CHECK_THROWS_AS(parse(pattern, q, Engine::bitparallel, o), NoMatch);
      continue;
    }
    ++matched;
    ParseResult r = parse(pattern, q, Engine::bitparallel, o);
    CHECK(replay_valid(a, q, r.positions));
  }
  CHECK(matched > 250);
  CHECK(mon.decompositions > 100);
  CHECK(mon.violations() == 0);
}

TEST_CASE("ClosureTable: every memoized entry equals a plain closure of the decoded micro") {
  // Make sure there is something in the table.
  Built b("((ab)*|(c(a|b)*)*)*d");
  MicroForest f = build_micro_forest(b.ast, b.a, 4);
  fast_match(f, to_symbols("ababcabd"));

  std::size_t checked = 0;
  ClosureTable::shared().for_each_entry([&](const MicroShape& shape, Direction d, std::uint64_t set,
                                            std::uint64_t result) {
    Tnfa local = micro_tnfa(shape);
    StateSet s(shape.states);
    for (std::size_t i = 0; i < shape.states; ++i)
      if (set >> i & 1U) s.set(i);
    s = closed(local, s, d);
    std::uint64_t want = 0;
    s.for_each([&](std::size_t i) { want |= std::uint64_t{1} << i; });
    CHECK(result == want);
    ++checked;
  });
  CHECK(checked > 0);
  CHECK(checked == ClosureTable::shared().entries());
}

TEST_CASE("ClosureTable: equal micro shapes share one entry") {
  ClosureTable table;
  const MicroShape* a = table.intern("SSccc");
  const MicroShape* b = table.intern("SSccc");
  CHECK(a == b);
  CHECK(table.shapes() == 1);
  table.close(a, 1, Direction::forward);
  table.close(b, 1, Direction::forward);
  CHECK(table.entries() == 1);
}

TEST_CASE("ClosureTable: concurrent matching on one forest") {
  ClosureTable table;
  Built b("((a|b)*c(a|(bc)*))*");
  MicroForest f = build_micro_forest(b.ast, b.a, 5, table);
  std::mt19937_64 rng(97);
  std::vector<std::string> inputs;
  for (int i = 0; i < 64; ++i) inputs.push_back(sample_accepted(b.a, 40, rng));
  std::vector<int> results(4 * inputs.size(), -1);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = 0; i < inputs.size(); ++i)
        results[w * inputs.size() + i] = fast_match(f, to_symbols(inputs[i])) ? 1 : 0;
    });
  for (auto& th : pool) th.join();
  for (int r : results) CHECK(r == 1);
}
