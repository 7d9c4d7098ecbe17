#pragma once

// The approximated smooth Moebius array mu_hat over a prime list, per field.
//
// mu_hat[k] = sum of h(n) * (-1)^omega(n) over square-free n built from the
// given primes with khat(n) = k. C_r collects products of exactly r distinct
// primes and E_r the r-th prime powers; they satisfy Newton's identities.

#include <cstddef>
#include <span>
#include <vector>

#include "pcount/modmath.hpp"
#include "pcount/segmentation.hpp"
#include "pcount/weight.hpp"

namespace pcount {

using SegArray = std::vector<u64>;

/// E_1[k] = sum of h(p) over primes with kbar(p) = k <= kmax.
SegArray build_E1(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 kmax);

/// E_r[k] = sum of h(p)^r over primes with r * kbar(p) = k <= kmax.
SegArray build_Er(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 r, u64 kmax);

/// Index dilation out[r * i] = in[i], keeping out_len entries.
SegArray dilate_Er(std::span<const u64> e1, u64 r, std::size_t out_len);

/// C_0..C_rmax from E_1..E_rmax (e[0] unused) by the time-domain recurrence, truncated to kmax.
std::vector<SegArray> newton_direct(std::span<const SegArray> e, u64 r_max, const Montgomery& field, u64 kmax);

/// mu_hat through newton_direct; the reference for the transform path.
SegArray mu_hat_direct(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 kmax);

struct PrimeRange {
    std::size_t first = 0;  // index range into the prime list
    std::size_t last = 0;   // exclusive
    u64 r_max = 0;
    std::size_t length = 0;  // transform length
};

/// Ranges by log2 p in [log2 N / 2^(m+1), log2 N / 2^m), m >= 1, the top range closed.
/// Primes with kbar(p) > kmax are dropped.
std::vector<PrimeRange> partition_primes(std::span<const u64> primes, u64 n, FixedDelta delta, u64 kmax,
                                         bool split = true);

struct MobiusOptions {
    bool partition = true;
    unsigned threads = 1;
};

/// mu_hat of length kmax + 1 computed per range in Fourier space and merged by
/// truncated products in a balanced tree.
SegArray mu_hat_partitioned(std::span<const u64> primes, const BoundWeight& weight, u64 n, FixedDelta delta,
                            u64 kmax, const MobiusOptions& options = {});

/// mu_hat of one range, truncated to kmax + 1.
SegArray mu_hat_range(std::span<const u64> primes, const PrimeRange& range, const BoundWeight& weight,
                      FixedDelta delta, u64 kmax, unsigned threads = 1);

}  // namespace pcount
