#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ambieq {

/// Canonical float formatting for CSV/JSON/config output: up to 12
/// significant digits with trailing zeros trimmed (shortest form within
/// that precision), positional notation for 1e-4 <= |x| < 1e12 and
/// scientific outside. Stable across runs and platforms for identical
/// doubles.
std::string format_float(double value);

/// FNV-1a 64-bit hash, used for config digests.
std::uint64_t fnv1a64(std::string_view text);

/// Lower-case hex rendering of a 64-bit value, zero-padded to 16 chars.
std::string to_hex(std::uint64_t value);

/// Current UTC time as ISO-8601 (seconds resolution).
std::string iso8601_utc_now();

}  // namespace ambieq
