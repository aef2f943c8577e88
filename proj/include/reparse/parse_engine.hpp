#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "reparse/decomposition.hpp"
#include "reparse/string_decomposition.hpp"

namespace reparse {

class NoMatch : public std::runtime_error {
 public:
  NoMatch() : std::runtime_error("string does not match") {}
};

// One character transition per character of the string.
struct CompressedPath {
  tracked_vector<TransitionId> steps = make_tracked<TransitionId>(Category::bookkeeping);
};

// Regex literal position (1-based) for each character of the string.
struct ParseResult {
  tracked_vector<std::int32_t> positions = make_tracked<std::int32_t>(Category::result);
};

// Counters for the structural guarantees the recursion relies on.
struct InvariantMonitor {
  std::size_t nodes = 0;
  std::size_t base_cases = 0;
  std::size_t decompositions = 0;
  std::size_t split_size_violations = 0;  // a part above ceil(2k/3) + 8 states
  std::size_t light_children = 0;
  std::size_t light_length_violations = 0;  // a light child above 3n/4 + 1 characters
  std::size_t string_decompositions = 0;
  std::size_t double_writes = 0;
  std::size_t third_pass_changes = 0;  // filled in by the bit-parallel engine in debug mode
  std::size_t max_depth = 0;
  LabelCounts labels;

  std::size_t violations() const {
    return split_size_violations + light_length_violations + double_writes + third_pass_changes;
  }
};

// Recursion input seen at each node, for tests.
struct TraceEvent {
  std::size_t depth;
  const Ast& tree;
  const Tnfa& nfa;
  std::span<const Symbol> text;
  std::span<const std::uint32_t> chi;
};

struct EngineConfig {
  std::size_t gamma_n = 2;
  std::size_t gamma_m = 25;
  InvariantMonitor* monitor = nullptr;
  std::function<void(const TraceEvent&)> trace;
  // Overrides choose_inner(); may return kNoNode to force a base case.
  std::function<NodeId(const Ast&, std::size_t depth)> chooser;
};

// Marks characters that came from beta transitions; they have no image in
// the original string.
inline constexpr std::uint32_t kNoImage = 0xFFFFFFFFu;

// Stored-history simulation. Ties in the backward pass go to the smallest
// state, then the smallest transition id.
std::optional<CompressedPath> naive_parse(const Tnfa& a, std::span<const Symbol> q);

// Heavy child (longest, ties to the smaller index) last; the rest in index
// order.
std::vector<std::size_t> order_recursion(std::span<const std::size_t> lengths);

// What the recursive driver needs from an engine.
class PathBackend {
 public:
  virtual ~PathBackend() = default;
  virtual bool is_base(std::size_t n, std::size_t k) const = 0;
  // a is build_tnfa(tree); q must be accepted by a.
  virtual CompressedPath solve_base(const Ast& tree, const Tnfa& a, std::span<const Symbol> q) const = 0;
  // String decomposition in two phases so the parent automaton can be
  // released before the parts are built.
  virtual ValidPairSeq valid_pairs(const Ast& tree, const Tnfa& a, State start, State accept,
                                   std::span<const Symbol> q) const = 0;
  virtual StringDecomposition finish(const ValidPairSeq& v, const Decomposition& d, std::span<const Symbol> q,
                                     LabelCounts* counts) const = 0;
};

class NaiveBackend : public PathBackend {
 public:
  explicit NaiveBackend(const EngineConfig& cfg) : cfg_(cfg) {}
  bool is_base(std::size_t n, std::size_t k) const override { return n < cfg_.gamma_n || k < cfg_.gamma_m; }
  CompressedPath solve_base(const Ast& tree, const Tnfa& a, std::span<const Symbol> q) const override;
  ValidPairSeq valid_pairs(const Ast& tree, const Tnfa& a, State start, State accept,
                           std::span<const Symbol> q) const override;
  StringDecomposition finish(const ValidPairSeq& v, const Decomposition& d, std::span<const Symbol> q,
                             LabelCounts* counts) const override;

 private:
  const EngineConfig& cfg_;
};

// Writes out[chi[i]] for every character i of q that has an image; an empty
// chi stands for the identity. q must be accepted by a. Consumes its inputs so the heavy path can reuse them and
// the automaton can be released once it has been split.
void path(const PathBackend& backend, Automaton a, tracked_vector<Symbol> q, tracked_vector<std::uint32_t> chi,
          const EngineConfig& cfg, ParseResult& out);

// Replay check: each step starts in the closure of the previous step's
// target, reads the matching character, and the last closure holds accept.
bool replay_valid(const Tnfa& a, std::span<const Symbol> q, std::span<const TransitionId> steps);
bool replay_valid(const Tnfa& a, std::string_view q, std::span<const std::int32_t> positions);

enum class Engine { naive, linear, bitparallel };

std::optional<Engine> engine_from_name(std::string_view name);

struct ParseOptions {
  EngineConfig config;
  std::size_t t = 32;  // micro size for the bit-parallel engine
};

// Throws SyntaxError or NoMatch.
ParseResult parse(std::string_view pattern, std::string_view q, Engine engine, const ParseOptions& opts = {});
bool match(std::string_view pattern, std::string_view q, Engine engine, const ParseOptions& opts = {});

}  // namespace reparse
