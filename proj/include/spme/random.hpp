#pragma once

#include <cstdint>
#include <string_view>

namespace spme {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent seed for a named sub-stream, e.g. ("dataset", 5) or ("chain", 2).
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index = 0) noexcept;

}  // namespace spme
