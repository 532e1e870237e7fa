#pragma once

// Seeded property suites. Every check is an exact assertion; a suite
// reports how many cases it ran and the first counterexample it met.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ergolab::verify {

struct PropertyResult {
  std::string module;
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

std::vector<PropertyResult> rank_one_properties(std::uint64_t seed);
std::vector<PropertyResult> markov_properties(std::uint64_t seed);
std::vector<PropertyResult> ledrappier_properties(std::uint64_t seed);
std::vector<PropertyResult> cascade_properties(std::uint64_t seed);

std::vector<PropertyResult> all_properties(std::uint64_t seed);

}  // namespace ergolab::verify
