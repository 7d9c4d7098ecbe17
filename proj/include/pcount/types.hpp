#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcount {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct PrimePower {
    u64 prime;
    u32 exponent;
    bool operator==(const PrimePower&) const = default;
};

/// Result does not fit the modulus product or the supported word range.
class range_error : public std::range_error {
public:
    using std::range_error::range_error;
};

/// No NTT prime pair is available for the requested residue-class modulus.
class unsupported_modulus : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string to_string(i128 v);
std::string to_string(u128 v);

}  // namespace pcount
