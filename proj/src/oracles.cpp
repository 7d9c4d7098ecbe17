#include "pcount/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcount::oracle {

namespace {

u64 isqrt_naive(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<std::uint8_t> is_prime_table(u64 n) {
    std::vector<std::uint8_t> t(n + 1, 1);
    t[0] = 0;
    if (n >= 1) t[1] = 0;
    for (u64 i = 2; i * i <= n; ++i)
        if (t[i])
            for (u64 j = i * i; j <= n; j += i) t[j] = 0;
    return t;
}

std::vector<std::int8_t> mu_table(u64 n) {
    std::vector<std::int8_t> mu(n + 1, 1);
    std::vector<std::uint8_t> comp(n + 1, 0);
    mu[0] = 0;
    for (u64 p = 2; p <= n; ++p) {
        if (comp[p]) continue;
        for (u64 j = p; j <= n; j += p) {
            if (j > p) comp[j] = 1;
            mu[j] = static_cast<std::int8_t>(-mu[j]);
        }
        if (p <= n / p)
            for (u64 j = p * p; j <= n; j += p * p) mu[j] = 0;
    }
    return mu;
}

// Visits every prime p <= limit in increasing order through a segmented sieve.
template <class Visit>
void each_prime(u64 limit, Visit&& visit) {
    if (limit < 2) return;
    const u64 root = isqrt_naive(limit);
    const auto small = is_prime_table(root);
    std::vector<u64> base;
    for (u64 i = 2; i <= root; ++i)
        if (small[i]) base.push_back(i);
    const u64 seg = 1 << 18;
    std::vector<std::uint8_t> mark(seg);
    for (u64 lo = 2; lo <= limit; lo += seg) {
        const u64 hi = std::min(limit, lo + seg - 1);
        std::fill(mark.begin(), mark.end(), 1);
        for (u64 p : base) {
            if (p * p > hi) break;
            u64 start = std::max(p * p, (lo + p - 1) / p * p);
            for (u64 j = start; j <= hi; j += p) mark[j - lo] = 0;
        }
        for (u64 x = lo; x <= hi; ++x)
            if (mark[x - lo]) visit(x);
    }
}

}  // namespace

u64 pi_naive(u64 n) {
    u64 count = 0;
    each_prime(n, [&](u64) { ++count; });
    return count;
}

std::vector<u64> pi_naive_many(const std::vector<u64>& queries) {
    std::vector<std::size_t> idx(queries.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return queries[a] < queries[b]; });
    std::vector<u64> out(queries.size(), 0);
    if (queries.empty()) return out;
    const u64 top = queries[idx.back()];
    std::size_t q = 0;
    u64 count = 0;
    each_prime(top, [&](u64 p) {
        while (q < idx.size() && queries[idx[q]] < p) out[idx[q++]] = count;
        ++count;
    });
    while (q < idx.size()) out[idx[q++]] = count;
    return out;
}

i64 mertens_naive(u64 n) {
    const auto mu = mu_table(n);
    i64 m = 0;
    for (u64 i = 1; i <= n; ++i) m += mu[i];
    return m;
}

std::vector<i64> mertens_naive_many(const std::vector<u64>& queries) {
    std::vector<i64> out(queries.size(), 0);
    if (queries.empty()) return out;
    const u64 top = *std::max_element(queries.begin(), queries.end());
    const auto mu = mu_table(top);
    std::vector<i64> prefix(top + 1, 0);
    for (u64 i = 1; i <= top; ++i) prefix[i] = prefix[i - 1] + mu[i];
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = prefix[queries[i]];
    return out;
}

u64 sqfree_naive(u64 n) {
    std::vector<std::uint8_t> bad(n + 1, 0);
    for (u64 d = 2; d <= n / d; ++d)
        for (u64 j = d * d; j <= n; j += d * d) bad[j] = 1;
    u64 count = 0;
    for (u64 i = 1; i <= n; ++i) count += bad[i] ? 0 : 1;
    return count;
}

i128 totient_sum_naive(u64 n) {
    std::vector<u64> phi(n + 1);
    std::iota(phi.begin(), phi.end(), u64{0});
    for (u64 p = 2; p <= n; ++p) {
        if (phi[p] != p) continue;
        for (u64 j = p; j <= n; j += p) phi[j] -= phi[j] / p;
    }
    i128 total = 0;
    for (u64 i = 1; i <= n; ++i) total += phi[i];
    return total;
}

i128 sum_primes_naive(u64 n, unsigned ell) {
    i128 total = 0;
    each_prime(n, [&](u64 p) {
        i128 term = 1;
        for (unsigned i = 0; i < ell; ++i) term *= p;
        total += term;
    });
    return total;
}

u64 pi_mod_naive(u64 n, u64 m, u64 r) {
    if (m == 0) throw std::invalid_argument("pi_mod_naive: modulus must be positive");
    u64 count = 0;
    each_prime(n, [&](u64 p) { count += (p % m == r % m) ? 1 : 0; });
    return count;
}

std::vector<u64> pi_mod_naive_all(u64 n, u64 m) {
    if (m == 0) throw std::invalid_argument("pi_mod_naive: modulus must be positive");
    std::vector<u64> counts(m, 0);
    each_prime(n, [&](u64 p) { ++counts[p % m]; });
    return counts;
}

std::vector<u64> primes_trial(u64 n) {
    std::vector<u64> out;
    for (u64 x = 2; x <= n; ++x) {
        bool prime = true;
        for (u64 d = 2; d * d <= x; ++d)
            if (x % d == 0) {
                prime = false;
                break;
            }
        if (prime) out.push_back(x);
    }
    return out;
}

std::vector<PrimePower> factor_trial(u64 n) {
    std::vector<PrimePower> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        u32 e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

std::vector<i64> dirichlet_convolve_naive(const std::vector<i64>& f, const std::vector<i64>& g, u64 n) {
    if (f.size() <= n || g.size() <= n) throw std::invalid_argument("dirichlet_convolve_naive: inputs too short");
    std::vector<i64> h(n + 1, 0);
    for (u64 d = 1; d <= n; ++d) {
        if (f[d] == 0) continue;
        for (u64 e = 1; d * e <= n; ++e) h[d * e] += f[d] * g[e];
    }
    return h;
}

std::vector<i64> mu_smooth_naive(u64 n, u64 bound) {
    std::vector<i64> out(n + 1, 0);
    for (u64 x = 1; x <= n; ++x) {
        const auto f = factor_trial(x);
        bool ok = true;
        for (const auto& pp : f)
            if (pp.exponent > 1 || pp.prime > bound) ok = false;
        out[x] = ok ? ((f.size() % 2) ? -1 : 1) : 0;
    }
    return out;
}

i128 error_term_naive_pairs(u64 n, u64 bound, const CellFn& kbar, u64 limit,
                            const std::function<i128(u64)>& weight) {
    const u64 kmax = kbar(n);
    i128 total = 0;
    for (u64 d2 = 1; d2 <= limit; ++d2) {
        const auto f = factor_trial(d2);
        bool ok = true;
        u64 khat = 0;
        for (const auto& pp : f) {
            if (pp.exponent > 1 || pp.prime > bound) ok = false;
            khat += kbar(pp.prime);
        }
        if (!ok || khat > kmax) continue;
        const i64 mu = (f.size() % 2) ? -1 : 1;
        for (u64 d1 = n / d2 + 1; d1 <= limit / d2; ++d1) {
            if (kbar(d1) + khat > kmax) continue;
            const i128 h = weight ? weight(d1 * d2) : 1;
            total += h * mu;
        }
    }
    return total;
}

i64 error_term_naive_triples(u64 n, u64 t, const CellFn& kbar, u64 limit) {
    const u64 kmax = kbar(n);
    const auto mu = mu_table(t);
    i64 total = 0;
    for (u64 d2 = 1; d2 <= t; ++d2) {
        if (mu[d2] == 0) continue;
        for (u64 d3 = 1; d3 <= t; ++d3) {
            if (mu[d3] == 0 || d2 * d3 > limit) continue;
            const u64 d23 = d2 * d3;
            const u64 base = kbar(d2) + kbar(d3);
            for (u64 d1 = n / d23 + 1; d1 <= limit / d23; ++d1)
                if (kbar(d1) + base <= kmax) total += mu[d2] * mu[d3];
        }
    }
    return total;
}

std::vector<std::vector<i64>> squarefree_cells_naive(const std::vector<u64>& primes, const CellFn& cell, u64 kmax) {
    std::vector<u64> cells(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) cells[i] = cell(primes[i]);
    std::vector<std::vector<i64>> out(1, std::vector<i64>(kmax + 1, 0));
    auto walk = [&](auto&& self, std::size_t start, std::size_t r, u64 k) -> void {
        if (out.size() <= r) out.resize(r + 1, std::vector<i64>(kmax + 1, 0));
        out[r][k] += 1;
        for (std::size_t j = start; j < primes.size(); ++j)
            if (k + cells[j] <= kmax) self(self, j + 1, r + 1, k + cells[j]);
    };
    walk(walk, 0, 0, 0);
    return out;
}

std::vector<std::vector<u64>> squarefree_cells_naive_mod(const std::vector<u64>& primes, const CellFn& cell,
                                                         u64 kmax, const std::function<u64(u64)>& h, u64 modulus) {
    std::vector<u64> cells(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) cells[i] = cell(primes[i]);
    std::vector<std::vector<u64>> out(1, std::vector<u64>(kmax + 1, 0));
    auto walk = [&](auto&& self, std::size_t start, std::size_t r, u64 k, u64 w) -> void {
        if (out.size() <= r) out.resize(r + 1, std::vector<u64>(kmax + 1, 0));
        out[r][k] = static_cast<u64>((static_cast<u128>(out[r][k]) + w) % modulus);
        for (std::size_t j = start; j < primes.size(); ++j)
            if (k + cells[j] <= kmax) {
                const u64 hw = static_cast<u64>(static_cast<u128>(w) * (h(primes[j]) % modulus) % modulus);
                self(self, j + 1, r + 1, k + cells[j], hw);
            }
    };
    walk(walk, 0, 0, 0, 1 % modulus);
    return out;
}

}  // namespace pcount::oracle
