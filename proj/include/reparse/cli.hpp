#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "reparse/parse_engine.hpp"

namespace reparse {

struct BenchRecord {
  std::string engine;
  std::size_t n = 0;  // requested length; the generated text can differ slightly
  std::size_t m = 0;
  std::optional<std::size_t> t;
  std::uint64_t seed = 0;
  double millis = 0;
  std::size_t peak_bytes = 0;
  std::map<std::string, std::size_t> by_category;  // per-category peaks
  bool match = false;
  std::optional<std::string> error;  // set when the case failed
};

// One JSON object, no trailing newline. Keys follow the documented schema
// order; "error" appears only on failed cases.
std::string to_json_line(const BenchRecord& r);

// Generates gen_instance(seed, m, n) and parses it under a fresh ledger.
// Failures other than NoMatch are caught and recorded.
BenchRecord run_bench_case(Engine engine, std::size_t n, std::size_t m, std::uint64_t seed, std::size_t t);

// Exit codes: 0 match (or bench finished), 1 no match, 2 usage or syntax
// error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reparse
