#pragma once

#include <cstdint>
#include <optional>

namespace ccg {

/// Peak resident set size of this process, when the platform reports it.
std::optional<std::uint64_t> peak_memory_bytes();

}  // namespace ccg
