#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pcount/oracles.hpp"
#include "pcount/segmentation.hpp"
#include "pcount/sieve.hpp"
#include "support.hpp"

using namespace pcount;
using testing_support::uniform;

namespace {

u128 parse_u128(const char* s) {
    u128 v = 0;
    for (; *s; ++s) v = v * 10 + static_cast<unsigned>(*s - '0');
    return v;
}

FixedDelta fd(long double d) { return FixedDelta::from_value(d); }

}  // namespace

TEST_CASE("fixed-point log2 against high-precision references") {
    CHECK(log2_fixed(1) == 0);
    CHECK(log2_fixed(2) == static_cast<u128>(1) << 64);
    CHECK(log2_fixed(u64{1} << 40) == static_cast<u128>(40) << 64);
    const std::pair<u64, const char*> refs[] = {
        {3, "29237397617229858719"},
        {10, "61278757397652712441"},
        {1000003, "367672624224875103334"},
        {1000000000000000009ULL, "1103017633157748824180"},
        {4611686018427387847ULL, "1143698132569992199863"},
        {9223372036854775809ULL, "1162144876643701751810"},
        {18446744073709551615ULL, "1180591620717411303422"},
    };
    for (const auto& [n, want] : refs) {
        CHECK(log2_fixed(n) == parse_u128(want));
        CHECK(log2_fixed_wide(n) == parse_u128(want));
    }
}

TEST_CASE("fast log path agrees with the wide path") {
    for (int i = 0; i < 3000; ++i) {
        const u64 n = uniform(1, ~u64{0} >> uniform(0, 63));
        REQUIRE(log2_fixed(n) == log2_fixed_wide(n));
    }
    for (unsigned b = 1; b < 64; ++b)
        for (u64 off : {u64{1}, u64{2}, u64{3}}) {
            const u64 p = u64{1} << b;
            REQUIRE(log2_fixed(p + off) == log2_fixed_wide(p + off));
            if (p > off) REQUIRE(log2_fixed(p - off) == log2_fixed_wide(p - off));
        }
}

TEST_CASE("log is superadditive under the fixed-point floor") {
    for (int i = 0; i < 100000; ++i) {
        const u64 a = uniform(1, u64{1} << uniform(1, 31)), b = uniform(1, u64{1} << uniform(1, 31));
        REQUIRE(log2_fixed(a) + log2_fixed(b) <= log2_fixed(a * b));
    }
}

TEST_CASE("delta_default") {
    CHECK(delta_default(u64{1} << 20) == doctest::Approx(0.01953125));
    CHECK(delta_default(4) == doctest::Approx(1.0));
    CHECK(delta_default(1000, 2.0L) == doctest::Approx(2.0 * static_cast<double>(delta_default(1000))));
    CHECK_THROWS_AS(delta_default(1), std::invalid_argument);
    CHECK_THROWS_AS(delta_default(100, 0), std::invalid_argument);
    const long double lg = std::log2(1e9L);
    CHECK(pipeline_delta(1000000000) * lg < 0.25L);
    CHECK(FixedDelta::from_value(0.5L).raw == static_cast<u128>(1) << 95);
    CHECK_THROWS_AS(FixedDelta::from_value(0), std::invalid_argument);
}

TEST_CASE("kbar and khat with unit delta") {
    const FixedDelta one = fd(1);
    CHECK(kbar(9, one) == 3);
    CHECK(kbar(3, one) == 1);
    CHECK(kbar(1, one) == 0);
    CHECK(kbar(1, fd(0.001L)) == 0);
    CHECK_THROWS_AS(kbar(0, one), std::invalid_argument);

    const std::vector<PrimePower> nine{{3, 2}}, fortytwo{{2, 1}, {3, 1}, {7, 1}};
    CHECK(khat(nine, one) == 2);
    CHECK(khat(fortytwo, one) == 4);
    CHECK(khat({}, one) == 0);
    for (u64 p : primes_up_to(1000)) {
        const std::vector<PrimePower> f{{p, 1}};
        CHECK(khat(f, fd(0.03L)) == kbar(p, fd(0.03L)));
    }
}

TEST_CASE("kbar is exact floor of log2 n / delta") {
    for (long double d : {1.0L, 0.5L, 0.1L, 0.0123L, 1e-5L}) {
        const FixedDelta del = fd(d);
        const KbarEvaluator ev(del);
        for (int i = 0; i < 2000; ++i) {
            const u64 n = uniform(1, u64{1} << uniform(1, 62));
            const u64 k = kbar(n, del);
            REQUIRE(ev(n) == k);
            // k * Delta <= log2 n < (k + 1) * Delta, in exact fixed point
            const u128 t = log2_fixed(n);
            REQUIRE((static_cast<u128>(k) * del.raw >> 32) <= t);
        }
    }
}

TEST_CASE("kbar subadditivity on random pairs") {
    for (long double d : {1.0L, 0.3L, 0.01L}) {
        const FixedDelta del = fd(d);
        const KbarEvaluator ev(del);
        for (int i = 0; i < 100000 / 3; ++i) {
            const u64 a = uniform(1, 1u << 30), b = uniform(1, 1u << 30);
            const u64 ka = ev(a), kb = ev(b), kab = ev(a * b);
            REQUIRE(ka + kb <= kab);
            REQUIRE(kab <= ka + kb + 1);
        }
    }
}

TEST_CASE("khat bounds from full factorizations") {
    const FixedDelta del = fd(0.07L);
    const KbarEvaluator ev(del);
    const auto fs = factorize_interval(1, 100000, 400);
    for (const auto& f : fs) {
        const u64 kh = khat(f.factors, del);
        const u64 kb = ev(f.n);
        u64 big_omega = 0;
        for (const auto& pp : f.factors) big_omega += pp.exponent;
        REQUIRE(kh <= kb);
        // each factor loses at most one cell and there are at most log2 n of them
        REQUIRE(kb <= kh + big_omega);
        REQUIRE(static_cast<long double>(kb) - std::log2(static_cast<long double>(f.n)) <= kh);
    }
}

TEST_CASE("ones array examples") {
    const auto unit = build_ones_bar(SegmentGrid(fd(0.5L), 10), 10);
    CHECK(unit[0] == 1);
    CHECK(unit[1] == 0);
    CHECK(unit[2] == 1);
    CHECK(unit[3] == 1);
    CHECK(unit[4] == 2);

    const SegmentGrid g1(fd(1), 20);
    const auto ones = build_ones_bar(g1, 20);
    for (u64 k = 0; k <= 20; ++k) CHECK(ones[k] == (u64{1} << k));

    for (long double d : {0.5L, 0.25L, 0.1L}) {
        const SegmentGrid g(fd(d), 80);
        const auto o = build_ones_bar(g, 80);
        u64 sum = 0;
        for (u64 k = 0; k <= 80; ++k) {
            sum += o[k];
            // cell boundaries at ceil(2^(Delta k)) unless 2^(Delta k) is within rounding of an integer
            const long double edge = std::exp2(d * (k + 1));
            if (std::fabs(edge - std::round(edge)) > 1e-9L)
                CHECK(sum == static_cast<u64>(std::ceil(edge)) - 1);
        }
    }
}

TEST_CASE("ones cells and monotonicity by enumeration up to 1e6") {
    const FixedDelta del = fd(0.01L);
    const KbarEvaluator ev(del);
    const u64 limit = 1000000;
    const u64 top = ev(limit);
    const SegmentGrid grid(del, top + 1);
    const auto ones = build_ones_bar(grid, top + 1);
    std::vector<u64> count(top + 2, 0);
    u64 prev = 0;
    for (u64 n = 1; n <= limit; ++n) {
        const u64 k = ev(n);
        REQUIRE(k >= prev);
        REQUIRE(grid.index_of(n) == k);
        prev = k;
        ++count[k];
    }
    for (u64 k = 0; k < top; ++k) REQUIRE(count[k] == ones[k]);
}

TEST_CASE("grid boundaries are minimal") {
    const FixedDelta del = fd(0.00123L);
    const SegmentGrid grid(del, 40000);
    for (int i = 0; i < 2000; ++i) {
        const u64 k = uniform(1, 40000);
        const u64 b = grid.lower(k);
        REQUIRE(kbar(b, del) >= k);
        REQUIRE(kbar(b - 1, del) < k);
    }
    for (int i = 0; i < 2000; ++i) {
        const u64 m = uniform(1, ~u64{0} >> 1);
        REQUIRE(grid.index_of(m) == kbar(m, del));
    }
}

TEST_CASE("critical interval size") {
    const auto sp = SegParams::make(1000000, 1e-4L);
    // N (2^(Delta (2 + log2 N) / (1 - Delta)) - 1) = 1521.488...
    CHECK(sp.s >= 1522);
    CHECK(sp.s <= 1523);
    CHECK(critical_interval_size(10, fd(1e-25L), IntervalRule::pairs) == 0);
    CHECK(critical_interval_size(100, fd(1e-25L), IntervalRule::pairs_shrunk, 10) == 0);
    CHECK_THROWS_AS(SegParams::make(1000, 0.1L), std::invalid_argument);
    CHECK_THROWS_AS(SegParams::make(1000, 0.6L), std::invalid_argument);

    u64 prev = 0;
    for (long double d = 1e-6L; d < 0.01L; d *= 1.3L) {
        const u64 s = critical_interval_size(100000, fd(d), IntervalRule::pairs);
        CHECK(s >= prev);
        prev = s;
        const u64 shrunk = critical_interval_size(100000, fd(d), IntervalRule::pairs_shrunk, 316);
        CHECK(shrunk <= s);
    }
}

TEST_CASE("critical interval covers every pair above N") {
    // exhaustive over d1 d2 <= 4N for small N
    for (u64 n : {20, 100, 500, 1234}) {
        for (long double d : {0.02L, 0.035L, 0.05L}) {
            if (d * std::log2(static_cast<long double>(n)) >= 0.25L) continue;
            const FixedDelta del = fd(d);
            const KbarEvaluator ev(del);
            const u64 kn = ev(n), b = pcount::isqrt(n);
            const u64 s = critical_interval_size(n, del, IntervalRule::pairs);
            const u64 s2 = critical_interval_size(n, del, IntervalRule::pairs_shrunk, b);
            for (u64 d2 = 1; d2 <= 4 * n; ++d2) {
                const auto f = oracle::factor_trial(d2);
                bool ok = true;
                u64 kh = 0;
                for (const auto& pp : f) {
                    if (pp.exponent > 1 || pp.prime > b) ok = false;
                    kh += ev(pp.prime);
                }
                if (!ok) continue;
                for (u64 d1 = n / d2 + 1; d1 * d2 <= 4 * n; ++d1)
                    if (ev(d1) + kh <= kn) {
                        REQUIRE(d1 * d2 <= n + s);
                        REQUIRE(d1 * d2 <= n + s2);
                    }
            }
        }
    }
}

TEST_CASE("triple interval reaches kbar(N) + 3") {
    for (u64 n : {1000, 54321, 9999999}) {
        const FixedDelta del = fd(0.004L);
        const u64 s = critical_interval_size(n, del, IntervalRule::triples);
        CHECK(kbar(n + s, del) <= kbar(n, del) + 3);
        CHECK(kbar(n + s + 1, del) >= kbar(n, del) + 4);
    }
}
