#pragma once

#include <cstdint>
#include <string_view>

#include "kgprobe/error.hpp"

namespace kgprobe::prompting {

class UnparseableResponse : public Error {
 public:
  using Error::Error;
};

/// 1 when the first alphabetic token is "true", 0 when it is "false"
/// (case-insensitive). Anything else throws UnparseableResponse.
int parse_verdict(std::string_view raw);

/// FNV-1a over the little-endian seed bytes then the text, finished with the
/// splitmix64 mixer. Platform independent.
std::uint64_t stable_hash(std::uint64_t seed, std::string_view text);

/// 1 iff stable_hash(seed, statement) mapped to [0, 1) is below target_rate.
int mock_verdict(std::string_view statement, std::uint64_t seed, double target_rate);

}  // namespace kgprobe::prompting
