#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "reparse/automata.hpp"

namespace reparse {

// Random pattern with exactly `literals` literal leaves drawn from
// `alphabet`. Zero literals gives the empty pattern.
std::string random_pattern(std::mt19937_64& rng, std::size_t literals, std::string_view alphabet);

// Random accepted string of roughly `target_len` bytes: a random walk that
// keeps to states from which characters can still be read, then the
// shortest completion to the accept state. Shorter when the language is
// finite.
std::string sample_accepted(const Tnfa& a, std::size_t target_len, std::mt19937_64& rng);

// One to three random substitutions, insertions or deletions.
std::string perturb(std::string s, std::string_view alphabet, std::mt19937_64& rng);

struct Instance {
  std::string pattern;
  std::string text;
  bool perturbed = false;
};

inline constexpr std::string_view kDefaultAlphabet = "abcd";

// Deterministic in the seed. The pattern is a random pattern with m_target
// literals under a star. About one instance in three is perturbed.
Instance gen_instance(std::uint64_t seed, std::size_t m_target, std::size_t n_target);

}  // namespace reparse
