#pragma once

// Brute-force reference implementations. Nothing here depends on the main pipeline.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pcount/types.hpp"

namespace pcount::oracle {

struct OracleReport {
    std::string function;
    u64 input = 0;
    i128 oracle_value = 0;
    i128 main_value = 0;
    bool match = false;
    double oracle_ms = 0;
    double main_ms = 0;
};

/// Prime count by a segmented sieve of Eratosthenes.
u64 pi_naive(u64 n);

/// pi at every query, sharing one sieve pass.
std::vector<u64> pi_naive_many(const std::vector<u64>& queries);

i64 mertens_naive(u64 n);
std::vector<i64> mertens_naive_many(const std::vector<u64>& queries);

u64 sqfree_naive(u64 n);
i128 totient_sum_naive(u64 n);
/// Sum of p^ell over primes p <= n.
i128 sum_primes_naive(u64 n, unsigned ell);
u64 pi_mod_naive(u64 n, u64 m, u64 r);
/// Counts for every residue r in [0, m).
std::vector<u64> pi_mod_naive_all(u64 n, u64 m);

/// Primes up to n by trial division.
std::vector<u64> primes_trial(u64 n);

/// (f * g)(n) = sum over d | n of f(d) g(n/d), for n = 1..N; index 0 is unused.
std::vector<i64> dirichlet_convolve_naive(const std::vector<i64>& f, const std::vector<i64>& g, u64 n);

/// mu(n) when n is square-free with every prime factor <= bound, else 0; n = 0..N.
std::vector<i64> mu_smooth_naive(u64 n, u64 bound);

using CellFn = std::function<u64(u64)>;

/// Pair error by exhaustive enumeration of (d1, d2) with N < d1 d2 <= limit.
/// weight(n) gives h(n); mu restricted to bound-smooth square-free d2.
i128 error_term_naive_pairs(u64 n, u64 bound, const CellFn& kbar, u64 limit,
                            const std::function<i128(u64)>& weight = nullptr);

/// Triple error by exhaustive enumeration of (d1, d2, d3), d2, d3 <= t, N < d1 d2 d3 <= limit.
i64 error_term_naive_triples(u64 n, u64 t, const CellFn& kbar, u64 limit);

/// counts[r][k]: number of square-free products of r distinct listed primes with
/// sum of cells k <= kmax.
std::vector<std::vector<i64>> squarefree_cells_naive(const std::vector<u64>& primes, const CellFn& cell, u64 kmax);

/// Same with weights h(n) = prod h(p) reduced modulo a prime.
std::vector<std::vector<u64>> squarefree_cells_naive_mod(const std::vector<u64>& primes, const CellFn& cell,
                                                         u64 kmax, const std::function<u64(u64)>& h, u64 modulus);

/// Full factorization by trial division, ascending.
std::vector<PrimePower> factor_trial(u64 n);

}  // namespace pcount::oracle
