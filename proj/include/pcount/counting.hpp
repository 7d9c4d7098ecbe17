#pragma once

// Public number-theoretic functions built on the segmented convolution pipeline.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcount/modmath.hpp"
#include "pcount/sieve.hpp"
#include "pcount/types.hpp"
#include "pcount/weight.hpp"

namespace pcount {

/// Largest N accepted by the pipelines.
constexpr u64 max_supported_n = 100'000'000'000'000ULL;
/// Largest residue-class modulus.
constexpr u64 max_residue_modulus = 4096;

struct Config {
    long double delta_scale = 1.0L;           // Delta = c * default
    u64 small_cutoff = 100'000;                // direct sieving below this N
    std::size_t chunk = default_chunk;         // correction block length
    unsigned threads = 1;
    ModulusPool pool = ModulusPool::primary;
    bool shrink_interval = false;              // smaller S for the pair correction
    bool partition = true;                     // split primes into ranges for mu_hat

    void validate() const;
};

struct ResultBundle {
    std::string function;
    i128 value = 0;
    u64 n = 0;
    long double delta = 0;
    u64 s = 0;
    ModulusPair moduli{{0, 0}};
    bool direct = false;                                 // answered by direct sieving
    std::vector<std::pair<std::string, double>> phases;  // milliseconds

    double total_ms() const;
};

ResultBundle count_primes(u64 n, const Config& config = {});
ResultBundle sum_over_primes(u64 n, const MultiplicativeWeight& weight, const Config& config = {});
ResultBundle count_primes_mod(u64 n, u64 m, u64 r, const Config& config = {});
ResultBundle mertens(u64 n, const Config& config = {});
ResultBundle count_squarefree(u64 n, const Config& config = {});
ResultBundle totient_sum(u64 n, const Config& config = {});

struct MultiResult {
    std::vector<i64> values;
    ResultBundle info;  // info.value is unused
};

/// M at every threshold with one convolution; every N_i <= T^2.
MultiResult mertens_multi(std::span<const u64> thresholds, u64 t, const Config& config = {});

}  // namespace pcount
