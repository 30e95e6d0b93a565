#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qcm {

inline constexpr std::string_view kToolName = "qcm";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest, used to stamp output files with input provenance.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes);

} // namespace qcm
