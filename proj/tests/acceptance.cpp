// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reparse/cli.hpp"
#include "reparse/generate.hpp"
#include "reparse/parse_engine.hpp"

using namespace reparse;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, double secs, double limit, const std::string& detail) {
  bool in_time = secs <= limit;
  bool pass = ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s (%.3fs, limit %gs%s)\n", pass ? "PASS" : "FAIL", id, detail.c_str(), secs,
              limit, in_time ? "" : ", over time");
  std::fflush(stdout);
}

const char* name(Engine e) {
  switch (e) {
    case Engine::naive: return "naive";
    case Engine::linear: return "linear";
    case Engine::bitparallel: return "bitparallel";
  }
  return "?";
}

void criterion1() {
  const std::vector<std::int32_t> want{1, 1, 2, 3};
  bool ok = true;
  double worst = 0;
  std::ostringstream detail;
  for (Engine e : {Engine::naive, Engine::linear, Engine::bitparallel}) {
    auto t0 = Clock::now();
    ParseResult r = parse("(a|(ba))*", "aaba", e);
    double secs = seconds_since(t0);
    worst = std::max(worst, secs);
    bool same = std::vector<std::int32_t>(r.positions.begin(), r.positions.end()) == want;
    ok = ok && same;
    detail << name(e) << (same ? " [1,1,2,3] " : " wrong ") << secs * 1e3 << "ms; ";
  }
  report(1, ok, worst, 1e-3, detail.str());
}

// Criteria 2, 4 and 6 share one run.
struct Shared {
  InvariantMonitor mon;
  std::size_t decomposition_errors = 0;
};

void criterion2(Shared& sh) {
  constexpr std::size_t kInstances = 2000;
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t disagreements = 0, invalid = 0, matched = 0, perturbed = 0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    std::size_t m = 1 + rng() % 60;
    std::size_t n = rng() % 201;
    Instance inst = gen_instance(1000 + i, m, n);
    if (inst.text.size() > 200) inst.text.resize(200);  // a walk's completion can overshoot
    perturbed += inst.perturbed;
    Tnfa a = build_tnfa(parse_pattern(inst.pattern));
    bool expect = accepts(a, inst.text);
    matched += expect;

    ParseOptions opts;
    opts.config.monitor = &sh.mon;
    opts.t = 3 + rng() % 6;
    for (Engine e : {Engine::naive, Engine::linear, Engine::bitparallel}) {
      try {
        ParseResult r = parse(inst.pattern, inst.text, e, opts);
        if (!expect) ++disagreements;
        if (!replay_valid(a, inst.text, r.positions)) ++invalid;
      } catch (const NoMatch&) {
        if (expect) ++disagreements;
      } catch (const std::logic_error&) {
        ++sh.decomposition_errors;
      }
    }
  }
  std::ostringstream d;
  d << kInstances << " instances (" << matched << " accepted, " << perturbed << " perturbed), " << disagreements
    << " disagreements, " << invalid << " invalid parses";
  report(2, disagreements == 0 && invalid == 0 && sh.decomposition_errors == 0, seconds_since(t0), 120, d.str());
}

void criterion3() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(3030);
  auto strings = oracle::all_strings("ab", 5);
  std::size_t disagreements = 0, checks = 0;
  for (int p = 0; p < 300; ++p) {
    std::string pattern = oracle::random_pattern(rng, static_cast<int>(rng() % 13), "ab");
    Ast ast = parse_pattern(pattern);
    oracle::LanguageOracle lang(ast);
    ParseOptions opts;
    opts.t = 3 + rng() % 6;
    for (const auto& s : strings) {
      bool want = lang.matches(s);
      for (Engine e : {Engine::naive, Engine::linear, Engine::bitparallel}) {
        ++checks;
        if (match(pattern, s, e, opts) != want) ++disagreements;
      }
    }
  }
  std::ostringstream d;
  d << "300 patterns x " << strings.size() << " strings x 3 engines = " << checks << " checks, " << disagreements
    << " disagreements";
  report(3, disagreements == 0, seconds_since(t0), 120, d.str());
}

void criterion4(const Shared& sh) {
  const auto& m = sh.mon;
  std::ostringstream d;
  d << m.decompositions << " decompositions, " << m.light_children << " light children, "
    << m.string_decompositions << " string decompositions; violations: split-size " << m.split_size_violations
    << ", light-length " << m.light_length_violations << ", string-invariant " << sh.decomposition_errors;
  bool ok = m.decompositions > 0 && m.light_children > 0 && m.split_size_violations == 0 && m.light_length_violations == 0 &&
            sh.decomposition_errors == 0;
  report(4, ok, 0, 1, d.str());
}

void criterion5() {
  auto t0 = Clock::now();
  constexpr std::uint64_t kSeeds = 4;
  const std::size_t ns[] = {4096, 8192, 16384};
  const std::size_t ms[] = {128, 256};
  auto mean_peak = [&](std::size_t n, std::size_t m) {
    double sum = 0;
    for (std::uint64_t s = 1; s <= kSeeds; ++s) sum += double(run_bench_case(Engine::linear, n, m, s, 32).peak_bytes);
    return sum / kSeeds;
  };
  double peak[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) peak[i][j] = mean_peak(ns[i], ms[j]);

  bool ok = true;
  double worst_n = 0, worst_m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      if (i + 1 < 3) worst_n = std::max(worst_n, peak[i + 1][j] / peak[i][j]);
      if (j + 1 < 2) worst_m = std::max(worst_m, peak[i][j + 1] / peak[i][j]);
    }
  ok = worst_n <= 2.5 && worst_m <= 2.5;

  double worst_gap = 1e300;
  for (std::uint64_t s = 1; s <= kSeeds; ++s) {
    double naive = double(run_bench_case(Engine::naive, 16384, 512, s, 32).peak_bytes);
    double linear = double(run_bench_case(Engine::linear, 16384, 512, s, 32).peak_bytes);
    worst_gap = std::min(worst_gap, naive / linear);
  }
  ok = ok && worst_gap >= 10;

  std::ostringstream d;
  d.precision(3);
  d << "max peak(2n,m)/peak(n,m) " << worst_n << ", max peak(n,2m)/peak(n,m) " << worst_m
    << ", min naive/linear at n=16384 m=512 " << worst_gap << "x";
  report(5, ok, seconds_since(t0), 300, d.str());
}

void criterion6(const Shared& sh) {
  std::ostringstream d;
  d << sh.mon.third_pass_changes << " state sets changed by a third pass";
  report(6, sh.mon.third_pass_changes == 0, 0, 1, d.str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion7() {
  auto t0 = Clock::now();
  struct Case {
    const char* golden;
    std::vector<const char*> args;
  };
  const std::vector<Case> cases{
      {"parse_example", {"reparse", "parse", "(a|(ba))*", "aaba"}},
      {"match_reject", {"reparse", "match", "(a|(ba))*", "b"}},
      {"parse_syntax_error", {"reparse", "parse", "(", "a"}},
  };
  std::size_t same = 0;
  for (const auto& c : cases) {
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(c.args.size()), c.args.data(), out, err);
    std::string base = std::string(REPARSE_GOLDEN_DIR) + "/" + c.golden;
    if (out.str() == slurp(base + ".stdout") && std::to_string(code) + "\n" == slurp(base + ".exit")) ++same;
  }
  std::ostringstream d;
  d << same << "/3 examples byte-identical";
  report(7, same == cases.size(), seconds_since(t0), 1, d.str());
}

}  // namespace

int main() {
  Shared sh;
  criterion1();
  criterion2(sh);
  criterion3();
  criterion4(sh);
  criterion5();
  criterion6(sh);
  criterion7();
  return failures == 0 ? 0 : 1;
}
