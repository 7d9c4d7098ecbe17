#include "pcount/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcount {

u64 FactoredNumber::divisor_count() const {
    u64 t = 1;
    for (const auto& f : factors) t *= f.exponent + 1;
    return t;
}

bool FactoredNumber::squarefree() const {
    return std::all_of(factors.begin(), factors.end(), [](const PrimePower& f) { return f.exponent == 1; });
}

std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> out;
    if (limit < 2) return out;
    out.push_back(2);
    // odd-only: index i stands for 2i + 1
    const u64 half = (limit - 1) / 2;
    std::vector<std::uint8_t> composite(half + 1, 0);
    for (u64 i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const u64 p = 2 * i + 1;
        out.push_back(p);
        if (p > limit / p) continue;
        for (u64 j = (p * p - 1) / 2; j <= half; j += p) composite[j] = 1;
    }
    return out;
}

MuTable mu_up_to(u64 limit) {
    std::vector<std::int8_t> mu(limit + 1, 0);
    if (limit >= 1) mu[1] = 1;
    std::vector<u64> primes;
    std::vector<std::uint8_t> composite(limit + 1, 0);
    for (u64 i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (u64 p : primes) {
            if (p > limit / i) break;
            composite[i * p] = 1;
            if (i % p == 0) {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = static_cast<std::int8_t>(-mu[i]);
        }
    }
    return MuTable(std::move(mu));
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

namespace {

void check_interval(u64 lo, u64 hi, u64 prime_budget) {
    if (hi < lo) throw std::invalid_argument("factorize_interval: hi < lo");
    if (hi > (u64{1} << 62)) throw std::invalid_argument("factorize_interval: beyond supported word range");
    if (prime_budget < isqrt(hi)) throw std::invalid_argument("factorize_interval: prime budget below sqrt(hi)");
}

}  // namespace

void factorize_interval_chunks(u64 lo, u64 hi, u64 prime_budget, std::size_t chunk,
                               const std::function<void(std::span<const FactoredNumber>)>& visit) {
    check_interval(lo, hi, prime_budget);
    if (chunk == 0) throw std::invalid_argument("factorize_interval: zero chunk size");
    const auto primes = primes_up_to(isqrt(hi));
    std::vector<u64> rest;
    std::vector<FactoredNumber> out;
    for (u64 a = lo; a < hi;) {
        const u64 b = std::min<u64>(hi, a + chunk);
        const std::size_t len = b - a;
        rest.resize(len);
        out.assign(len, FactoredNumber{});
        for (std::size_t i = 0; i < len; ++i) {
            rest[i] = a + 1 + i;
            out[i].n = a + 1 + i;
            out[i].complete = true;
        }
        for (u64 p : primes) {
            for (u64 m = (a / p + 1) * p; m <= b; m += p) {
                const std::size_t i = m - a - 1;
                u32 e = 0;
                while (rest[i] % p == 0) {
                    rest[i] /= p;
                    ++e;
                }
                out[i].factors.push_back({p, e});
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            if (rest[i] > 1) out[i].factors.push_back({rest[i], 1});
        }
        visit(out);
        a = b;
    }
}

std::vector<FactoredNumber> factorize_interval(u64 lo, u64 hi, u64 prime_budget, std::size_t chunk) {
    std::vector<FactoredNumber> all;
    all.reserve(hi >= lo ? hi - lo : 0);
    factorize_interval_chunks(lo, hi, prime_budget, chunk, [&](std::span<const FactoredNumber> part) {
        all.insert(all.end(), part.begin(), part.end());
    });
    return all;
}

BlockSieve::BlockSieve(std::span<const u64> primes) : primes_(primes) {
    if (primes.size() > index_mask) throw std::invalid_argument("BlockSieve: too many primes");
}

void BlockSieve::sieve(u64 a, u64 b, std::vector<u32>& rows) const {
    if (b < a) throw std::invalid_argument("BlockSieve: empty block order");
    const std::size_t len = b - a;
    rows.assign(len * row_width, 0);
    u32* base = rows.data();
    for (std::size_t j = 0; j < primes_.size(); ++j) {
        const u64 p = primes_[j];
        if (p > b) break;
        const u32 tag = static_cast<u32>(j);
        for (u64 m = (a / p + 1) * p; m <= b; m += p) {
            u32* row = base + (m - a - 1) * row_width;
            row[++row[0]] = tag;
        }
        if (p <= b / p) {
            const u64 q = p * p;
            for (u64 m = (a / q + 1) * q; m <= b; m += q) {
                u32* row = base + (m - a - 1) * row_width;
                row[row[0]] |= square_flag;
            }
        }
    }
}

}  // namespace pcount
