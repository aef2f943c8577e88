#include "reparse/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <thread>
#include <vector>

#include "reparse/generate.hpp"
#include "reparse/syntax.hpp"

namespace reparse {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kMatch = 0;
constexpr int kNoMatch = 1;
constexpr int kError = 2;

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::naive: return "naive";
    case Engine::linear: return "linear";
    case Engine::bitparallel: return "bitparallel";
  }
  return "?";
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return true;
}

template <class T>
std::vector<T> split_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, std::string>) {
      out.push_back(item);
    } else {
      std::size_t used = 0;
      unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument("not a number: " + item);
      out.push_back(static_cast<T>(v));
    }
  }
  return out;
}

struct TextArgs {
  std::string pattern;
  std::string text;
  std::string input_file;
  std::string engine = "linear";
  std::size_t t = 32;
  std::size_t gamma_n = 2;
  std::size_t gamma_m = 25;
  bool json = true;
};

void add_text_args(CLI::App* cmd, TextArgs& a, bool tuning) {
  cmd->add_option("pattern", a.pattern, "Regular expression")->required();
  cmd->add_option("string", a.text, "Input string (omit with --input-file)");
  cmd->add_option("--input-file", a.input_file, "Read the input string verbatim from a file");
  cmd->add_option("--engine", a.engine, "naive, linear or bitparallel")->capture_default_str();
  cmd->add_option("--t", a.t, "Micro size for the bit-parallel engine")->capture_default_str();
  if (tuning) {
    cmd->add_option("--gamma-n", a.gamma_n, "Base case below this string length")->capture_default_str();
    cmd->add_option("--gamma-m", a.gamma_m, "Base case below this automaton size")->capture_default_str();
    cmd->add_flag("--json", a.json, "JSON output (the only format)");
  }
}

// Resolves the input text and options; returns an exit code on failure.
std::optional<int> prepare(const TextArgs& a, std::string& text, Engine& engine, ParseOptions& opts,
                           std::ostream& err) {
  auto e = engine_from_name(a.engine);
  if (!e) {
    err << "error: unknown engine '" << a.engine << "'\n";
    return kError;
  }
  engine = *e;
  if (a.t < 3 || a.t > 63) {
    err << "error: --t must be in 3..63\n";
    return kError;
  }
  if (!a.input_file.empty()) {
    if (!a.text.empty()) {
      err << "error: give either a string or --input-file, not both\n";
      return kError;
    }
    if (!read_file(a.input_file, text)) {
      err << "error: cannot read " << a.input_file << "\n";
      return kError;
    }
  } else {
    text = a.text;
  }
  opts.t = a.t;
  opts.config.gamma_n = a.gamma_n;
  opts.config.gamma_m = a.gamma_m;
  return std::nullopt;
}

int do_match(const TextArgs& a, std::ostream& out, std::ostream& err) {
  std::string text;
  Engine engine;
  ParseOptions opts;
  if (auto code = prepare(a, text, engine, opts, err)) return *code;
  try {
    bool ok = match(a.pattern, text, engine, opts);
    out << Json{{"match", ok}}.dump() << "\n";
    return ok ? kMatch : kNoMatch;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int do_parse(const TextArgs& a, std::ostream& out, std::ostream& err) {
  std::string text;
  Engine engine;
  ParseOptions opts;
  if (auto code = prepare(a, text, engine, opts, err)) return *code;
  try {
    ParseResult r = parse(a.pattern, text, engine, opts);
    Json j{{"match", true}, {"parse", Json::array()}};
    for (std::int32_t p : r.positions) j["parse"].push_back(p);
    out << j.dump() << "\n";
    return kMatch;
  } catch (const NoMatch&) {
    out << Json{{"match", false}}.dump() << "\n";
    return kNoMatch;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

struct BenchArgs {
  std::string engines = "naive,linear,bitparallel";
  std::string ns = "1024";
  std::string ms = "64";
  std::string ts = "32";
  std::uint64_t seeds = 1;
  std::size_t jobs = 1;
  std::string out_path;
};

int do_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  struct Case {
    Engine engine;
    std::size_t n, m, t;
    std::uint64_t seed;
  };
  std::vector<Case> cases;
  try {
    auto engines = split_list<std::string>(a.engines);
    auto ns = split_list<std::size_t>(a.ns);
    auto ms = split_list<std::size_t>(a.ms);
    auto ts = split_list<std::size_t>(a.ts);
    if (engines.empty() || ns.empty() || ms.empty() || ts.empty()) throw std::invalid_argument("empty list");
    for (const auto& name : engines) {
      auto e = engine_from_name(name);
      if (!e) throw std::invalid_argument("unknown engine '" + name + "'");
      for (std::size_t t : ts) {
        if (t < 3 || t > 63) throw std::invalid_argument("--t values must be in 3..63");
        // t only matters to the bit-parallel engine.
        if (*e != Engine::bitparallel && t != ts.front()) continue;
        for (std::size_t m : ms)
          for (std::size_t n : ns)
            for (std::uint64_t s = 0; s < a.seeds; ++s) cases.push_back({*e, n, m, t, s});
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) {
      err << "error: cannot write " << a.out_path << "\n";
      return kError;
    }
    sink = &file;
  }

  // Cases run on worker threads, each under its own ledger; this thread
  // alone writes, in case order.
  std::vector<BenchRecord> records(cases.size());
  std::size_t jobs = std::max<std::size_t>(1, std::min(a.jobs, cases.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < cases.size();) {
      const Case& c = cases[i];
      records[i] = run_bench_case(c.engine, c.n, c.m, c.seed, c.t);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& r : records) *sink << to_json_line(r) << "\n";
  return kMatch;
}

}  // namespace

std::string to_json_line(const BenchRecord& r) {
  Json j;
  j["engine"] = r.engine;
  j["n"] = r.n;
  j["m"] = r.m;
  j["t"] = r.t ? Json(*r.t) : Json(nullptr);
  j["seed"] = r.seed;
  j["millis"] = r.millis;
  j["peak_bytes"] = r.peak_bytes;
  j["by_category"] = Json::object();
  for (const auto& [k, v] : r.by_category) j["by_category"][k] = v;
  j["match"] = r.match;
  if (r.error) j["error"] = *r.error;
  return j.dump();
}

BenchRecord run_bench_case(Engine engine, std::size_t n, std::size_t m, std::uint64_t seed, std::size_t t) {
  BenchRecord r;
  r.engine = engine_name(engine);
  r.n = n;
  r.m = m;
  if (engine == Engine::bitparallel) r.t = t;
  r.seed = seed;
  Instance inst = gen_instance(seed, m, n);
  ParseOptions opts;
  opts.t = t;
  SpaceLedger ledger;
  auto t0 = std::chrono::steady_clock::now();
  {
    LedgerScope scope(&ledger);
    try {
      ParseResult p = parse(inst.pattern, inst.text, engine, opts);
      r.match = true;
    } catch (const NoMatch&) {
      r.match = false;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }
  r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.peak_bytes = ledger.peak();
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    r.by_category[std::string(category_name(static_cast<Category>(c)))] = ledger.peak(static_cast<Category>(c));
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regular expression parsing in linear space", "reparse"};
  app.require_subcommand(1);

  TextArgs match_args, parse_args;
  BenchArgs bench_args;
  auto* match_cmd = app.add_subcommand("match", "Report whether the pattern matches the whole string");
  add_text_args(match_cmd, match_args, false);
  auto* parse_cmd = app.add_subcommand("parse", "Print the literal position read at each character");
  add_text_args(parse_cmd, parse_args, true);
  auto* bench_cmd = app.add_subcommand("bench", "Run generated instances and print JSON lines");
  bench_cmd->add_option("--engines", bench_args.engines, "Comma-separated engines")->capture_default_str();
  bench_cmd->add_option("--n", bench_args.ns, "Comma-separated string lengths")->capture_default_str();
  bench_cmd->add_option("--m", bench_args.ms, "Comma-separated literal counts")->capture_default_str();
  bench_cmd->add_option("--t", bench_args.ts, "Comma-separated micro sizes (bit-parallel only)")
      ->capture_default_str();
  bench_cmd->add_option("--seeds", bench_args.seeds, "Seeds 0..N-1 per size")->capture_default_str();
  bench_cmd->add_option("--jobs", bench_args.jobs, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out_path, "Write records here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kMatch;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kMatch;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'reparse --help' for usage\n";
    return kError;
  }

  if (*match_cmd) return do_match(match_args, out, err);
  if (*parse_cmd) return do_parse(parse_args, out, err);
  return do_bench(bench_args, out, err);
}

}  // namespace reparse
