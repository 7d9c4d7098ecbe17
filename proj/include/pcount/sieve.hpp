#pragma once

// Prime generation, Moebius tables and segmented factorization of intervals.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcount/types.hpp"

namespace pcount {

struct FactoredNumber {
    u64 n = 0;
    std::vector<PrimePower> factors;  // ascending primes
    bool complete = false;

    std::size_t omega() const { return factors.size(); }
    u64 largest_prime() const { return factors.empty() ? 1 : factors.back().prime; }
    u64 divisor_count() const;
    bool squarefree() const;
};

class MuTable {
public:
    MuTable() = default;
    explicit MuTable(std::vector<std::int8_t> values) : values_(std::move(values)) {}

    u64 limit() const { return values_.empty() ? 0 : values_.size() - 1; }
    int operator()(u64 n) const { return values_[n]; }
    std::span<const std::int8_t> values() const { return values_; }

private:
    std::vector<std::int8_t> values_;  // index 0 unused, holds 0
};

/// floor(sqrt(n)).
u64 isqrt(u64 n);

std::vector<u64> primes_up_to(u64 limit);

MuTable mu_up_to(u64 limit);

constexpr std::size_t default_chunk = std::size_t{1} << 16;

/// Complete factorizations of every n in (lo, hi]. prime_budget >= floor(sqrt(hi)).
std::vector<FactoredNumber> factorize_interval(u64 lo, u64 hi, u64 prime_budget,
                                               std::size_t chunk = default_chunk);

/// Streaming form: calls visit once per chunk, in increasing n.
void factorize_interval_chunks(u64 lo, u64 hi, u64 prime_budget, std::size_t chunk,
                               const std::function<void(std::span<const FactoredNumber>)>& visit);

/// Division-free sieve recording, for each n of a block, the indices of the
/// distinct primes from a fixed list that divide n.
///
/// Row layout per n: row[0] = count, row[1..count] = prime index, with
/// square_flag set on an entry when p^2 also divides n.
class BlockSieve {
public:
    static constexpr std::size_t row_width = 16;
    static constexpr u32 square_flag = u32{1} << 31;
    static constexpr u32 index_mask = square_flag - 1;

    explicit BlockSieve(std::span<const u64> primes);

    /// Fills rows for n in (a, b]; rows is resized to (b - a) * row_width.
    void sieve(u64 a, u64 b, std::vector<u32>& rows) const;

    std::span<const u64> primes() const { return primes_; }

private:
    std::span<const u64> primes_;
};

}  // namespace pcount
