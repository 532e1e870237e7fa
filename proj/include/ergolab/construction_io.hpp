#pragma once

// Plain key-value construction files:
//
//   # Chacon
//   h1 = 1
//   w1 = "2/3"
//   stages = [[3, [0, 1, 0]]]
//   periodic = true
//
// Array values may span several lines. Unknown keys are rejected.

#include "ergolab/rank_one.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ergolab::rank_one {

Construction parse_construction(std::string_view text);
Construction load_construction(const std::filesystem::path& path);
std::string format_construction(const Construction& construction);

}  // namespace ergolab::rank_one
