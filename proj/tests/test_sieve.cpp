#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "pcount/oracles.hpp"
#include "pcount/sieve.hpp"
#include "support.hpp"

using namespace pcount;
using testing_support::uniform;

TEST_CASE("primes_up_to") {
    CHECK(primes_up_to(10) == std::vector<u64>{2, 3, 5, 7});
    CHECK(primes_up_to(1).empty());
    CHECK(primes_up_to(0).empty());
    CHECK(primes_up_to(2) == std::vector<u64>{2});
    const auto ps = primes_up_to(1000000);
    CHECK(ps.size() == 78498);
    CHECK(ps.size() == oracle::pi_naive(1000000));
    CHECK(primes_up_to(30000) == oracle::primes_trial(30000));
    for (int i = 0; i < 200; ++i) {
        const u64 p = ps[uniform(0, ps.size() - 1)];
        CHECK(oracle::factor_trial(p) == std::vector<PrimePower>{{p, 1}});
    }
}

TEST_CASE("isqrt") {
    for (u64 n = 0; n < 100000; ++n) {
        const u64 r = isqrt(n);
        REQUIRE(r * r <= n);
        REQUIRE((r + 1) * (r + 1) > n);
    }
    CHECK(isqrt(~u64{0}) == 4294967295ULL);
    CHECK(isqrt(u64{1} << 62) == u64{1} << 31);
}

TEST_CASE("mu_up_to") {
    const MuTable mu = mu_up_to(100000);
    const std::vector<int> first{1, -1, -1, 0, -1, 1};
    for (u64 n = 1; n <= 6; ++n) CHECK(mu(n) == first[n - 1]);
    CHECK(mu(4) == 0);
    CHECK(mu.limit() == 100000);
    const auto ref = oracle::mu_smooth_naive(100000, 100000);
    for (u64 n = 1; n <= 100000; ++n) REQUIRE(mu(n) == ref[n]);
    CHECK(mu_up_to(1).limit() == 1);
    CHECK(mu_up_to(1)(1) == 1);
}

TEST_CASE("factorize_interval examples") {
    const auto fs = factorize_interval(100, 110, 10);
    REQUIRE(fs.size() == 10);
    CHECK(fs[4].n == 105);
    CHECK(fs[4].factors == std::vector<PrimePower>{{3, 1}, {5, 1}, {7, 1}});
    CHECK(fs[4].complete);
    CHECK(factorize_interval(50, 50, 10).empty());
    CHECK_THROWS_AS(factorize_interval(10, 5, 10), std::invalid_argument);
    CHECK_THROWS_AS(factorize_interval(100, 1000, 10), std::invalid_argument);
    CHECK_THROWS_AS(factorize_interval(~u64{0} - 10, ~u64{0}, u64{1} << 32), std::invalid_argument);
}

TEST_CASE("factorize_interval agrees with trial division up to 1e5") {
    const auto fs = factorize_interval(1, 100000, 316, 4096);
    REQUIRE(fs.size() == 99999);
    std::vector<u64> primes_from_factors;
    for (const auto& f : fs) {
        REQUIRE(f.complete);
        REQUIRE(f.factors == oracle::factor_trial(f.n));
        if (f.factors.size() == 1 && f.factors[0].exponent == 1) primes_from_factors.push_back(f.n);
    }
    CHECK(primes_from_factors == primes_up_to(100000));
    const MuTable mu = mu_up_to(100000);
    for (const auto& f : fs) {
        const int want = f.squarefree() ? ((f.omega() % 2) ? -1 : 1) : 0;
        REQUIRE(mu(f.n) == want);
    }
}

TEST_CASE("factorizations re-multiply near 1e9 and 1e15") {
    for (u64 base : {u64{1000000000}, u64{1000000000000000ULL}}) {
        for (int rep = 0; rep < 3; ++rep) {
            const u64 lo = base + uniform(0, 1000000);
            const u64 hi = lo + 5000;
            const auto fs = factorize_interval(lo, hi, isqrt(hi), 1000);
            REQUIRE(fs.size() == 5000);
            for (std::size_t i = 0; i < fs.size(); ++i) {
                REQUIRE(fs[i].n == lo + 1 + i);
                u64 prod = 1;
                for (const auto& pp : fs[i].factors)
                    for (u32 e = 0; e < pp.exponent; ++e) prod *= pp.prime;
                REQUIRE(prod == fs[i].n);
                for (std::size_t j = 1; j < fs[i].factors.size(); ++j)
                    REQUIRE(fs[i].factors[j - 1].prime < fs[i].factors[j].prime);
            }
            CHECK(fs[uniform(0, 4999)].divisor_count() >= 1);
        }
    }
}

TEST_CASE("chunked factorization is chunk independent") {
    auto collect = [](std::size_t chunk) {
        std::vector<FactoredNumber> out;
        factorize_interval_chunks(123456, 133456, 400, chunk, [&](std::span<const FactoredNumber> c) {
            out.insert(out.end(), c.begin(), c.end());
        });
        return out;
    };
    const auto a = collect(97), b = collect(10000);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].n == b[i].n);
        CHECK(a[i].factors == b[i].factors);
    }
}

TEST_CASE("block sieve rows") {
    const auto primes = primes_up_to(100);
    const BlockSieve sieve(primes);
    std::vector<u32> rows;
    const u64 a = 99990, b = 100100;
    sieve.sieve(a, b, rows);
    REQUIRE(rows.size() == (b - a) * BlockSieve::row_width);
    for (u64 n = a + 1; n <= b; ++n) {
        const u32* row = rows.data() + (n - a - 1) * BlockSieve::row_width;
        std::vector<PrimePower> want;
        for (const auto& pp : oracle::factor_trial(n))
            if (pp.prime <= 100) want.push_back(pp);
        REQUIRE(row[0] == want.size());
        for (u32 j = 0; j < row[0]; ++j) {
            REQUIRE(primes[row[j + 1] & BlockSieve::index_mask] == want[j].prime);
            REQUIRE(((row[j + 1] & BlockSieve::square_flag) != 0) == (want[j].exponent >= 2));
        }
    }
}
