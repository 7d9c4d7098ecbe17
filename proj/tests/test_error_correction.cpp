#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pcount/error_correction.hpp"
#include "pcount/oracles.hpp"
#include "pcount/smooth_mobius.hpp"
#include "support.hpp"

using namespace pcount;
using testing_support::uniform;
using testing_support::uniform_real;

namespace {

oracle::CellFn cell_fn(FixedDelta d) {
    return [d](u64 n) { return kbar(n, d); };
}

// A delta inside the admissible window for N.
long double random_delta(u64 n) {
    const long double lg = std::log2(static_cast<long double>(n));
    return uniform_real(0.1L, 0.99L) * 0.25L / lg;
}

i64 pairs_streaming(const SegParams& sp, u64 bound, std::size_t chunk = default_chunk, unsigned threads = 1) {
    return error_term_pairs(CorrectionJob::streaming(sp, CorrectionMode::pairs, bound, chunk, threads)).unit;
}

std::vector<i64> plain_convolve(const std::vector<i64>& a, const std::vector<i64>& b, std::size_t len) {
    std::vector<i64> out(len, 0);
    for (std::size_t i = 0; i < a.size() && i < len; ++i)
        for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace

TEST_CASE("empty interval gives zero error") {
    const auto sp = SegParams::make(10, FixedDelta::from_value(1e-20L));
    REQUIRE(sp.s == 0);
    CHECK(pairs_streaming(sp, 3) == 0);
    const MuTable mu = mu_up_to(4);
    CHECK(error_term_triples(CorrectionJob::streaming(sp, CorrectionMode::triples, 4), mu) == 0);
}

TEST_CASE("pair error against exhaustive enumeration") {
    const u64 n = 1000;
    const auto sp = SegParams::make(n, 0.02L);
    const u64 b = isqrt(n);
    const i128 want = oracle::error_term_naive_pairs(n, b, cell_fn(sp.delta), n + sp.s);
    CHECK(pairs_streaming(sp, b) == static_cast<i64>(want));
    // nothing beyond the critical interval contributes
    CHECK(oracle::error_term_naive_pairs(n, b, cell_fn(sp.delta), 4 * n) == want);

    for (int t = 0; t < 40; ++t) {
        const u64 m = uniform(20, 5000);
        const auto p = SegParams::make(m, random_delta(m));
        const u64 bound = uniform(2, isqrt(m) + 3);
        REQUIRE(pairs_streaming(p, bound) ==
                static_cast<i64>(oracle::error_term_naive_pairs(m, bound, cell_fn(p.delta), 2 * m)));
        const auto shrunk = SegParams::make(m, p.delta, IntervalRule::pairs_shrunk, bound);
        REQUIRE(pairs_streaming(shrunk, bound) == pairs_streaming(p, bound));
    }
}

TEST_CASE("pair error closes the convolution identity") {
    const Montgomery f(select_moduli(1).primes[0]);
    const BoundWeight unit(MultiplicativeWeight::unit(), f);
    for (u64 n : {50, 333, 1000, 2000}) {
        const auto primes = primes_up_to(isqrt(n));
        const auto mu_b = oracle::mu_smooth_naive(n, isqrt(n));
        const std::vector<i64> one(n + 1, 1);
        const auto conv = oracle::dirichlet_convolve_naive(one, mu_b, n);
        i64 exact = 0;
        for (u64 i = 1; i <= n; ++i) exact += conv[i];
        for (int t = 0; t < 10; ++t) {
            const auto sp = SegParams::make(n, random_delta(n));
            const u64 kn = sp.kbar_n;
            const auto mu_hat = mu_hat_partitioned(primes, unit, n, sp.delta, kn);
            const auto ones = build_ones_bar(SegmentGrid(sp.delta, kn + 1), kn);
            const auto prod = multiply(ones, mu_hat, f, kn + 1);
            u64 acc = 0;
            for (u64 k = 0; k <= kn; ++k) acc = f.add(acc, prod[k]);
            const i64 err = pairs_streaming(sp, isqrt(n));
            REQUIRE(f.sub(acc, f.reduce_signed(err)) == f.reduce_signed(exact));
        }
    }
}

TEST_CASE("weighted and filtered pair errors") {
    const Montgomery f(select_moduli(1).primes[1]);
    const BoundWeight id(MultiplicativeWeight::power(1), f);
    const BoundWeight sq(MultiplicativeWeight::power(2), f);
    for (int t = 0; t < 15; ++t) {
        const u64 n = uniform(100, 4000);
        const auto sp = SegParams::make(n, random_delta(n));
        const u64 b = isqrt(n);
        const auto job = CorrectionJob::streaming(sp, CorrectionMode::pairs, b);
        const BoundWeight ws[] = {id, sq};
        const auto e = error_term_pairs(job, ws);
        const auto cell = cell_fn(sp.delta);
        CHECK(e.unit == static_cast<i64>(oracle::error_term_naive_pairs(n, b, cell, n + sp.s)));
        const i128 w1 = oracle::error_term_naive_pairs(n, b, cell, n + sp.s, [](u64 m) { return i128(m); });
        const i128 w2 = oracle::error_term_naive_pairs(n, b, cell, n + sp.s, [](u64 m) { return i128(m) * m; });
        CHECK(e.weighted[0] == f.reduce_wide(w1));
        CHECK(e.weighted[1] == f.reduce_wide(w2));

        for (u64 m : {3, 4, 7}) {
            const u64 r = uniform(1, m - 1);
            const auto filtered = error_term_pairs(job, {}, ResidueFilter{m, r});
            const i128 want = oracle::error_term_naive_pairs(n, b, cell, n + sp.s,
                                                             [&](u64 x) { return i128(x % m == r ? 1 : 0); });
            REQUIRE(filtered.unit == static_cast<i64>(want));
        }
    }
}

TEST_CASE("chunk, thread and interval independence") {
    const u64 n = 200000;
    const auto sp = SegParams::make(n, 0.003L);
    const u64 b = isqrt(n);
    const i64 ref = pairs_streaming(sp, b);
    CHECK(pairs_streaming(sp, b, 7) == ref);
    CHECK(pairs_streaming(sp, b, 1000, 3) == ref);
    CHECK(pairs_streaming(sp, b, 1 << 20, 2) == ref);

    auto fs = factorize_interval(n, n + sp.s, isqrt(n + sp.s) + 1);
    CHECK(error_term_pairs(CorrectionJob::with_interval(sp, CorrectionMode::pairs, b, fs)).unit == ref);

    auto short_fs = fs;
    short_fs.pop_back();
    CHECK_THROWS_AS(CorrectionJob::with_interval(sp, CorrectionMode::pairs, b, short_fs), std::invalid_argument);
    auto partial = fs;
    partial[5].factors.pop_back();
    CHECK_THROWS_AS(CorrectionJob::with_interval(sp, CorrectionMode::pairs, b, partial), std::invalid_argument);
    auto shifted = factorize_interval(n + 1, n + 1 + sp.s, isqrt(n + sp.s) + 2);
    CHECK_THROWS_AS(CorrectionJob::with_interval(sp, CorrectionMode::pairs, b, shifted), std::invalid_argument);
    CHECK_THROWS_AS(CorrectionJob::streaming(sp, CorrectionMode::pairs, b, 0), std::invalid_argument);
    const MuTable mu = mu_up_to(b);
    CHECK_THROWS_AS(error_term_triples(CorrectionJob::streaming(sp, CorrectionMode::pairs, b), mu),
                    std::invalid_argument);
    CHECK_THROWS_AS(error_term_pairs(CorrectionJob::streaming(sp, CorrectionMode::triples, b)), std::invalid_argument);
}

TEST_CASE("triple error against exhaustive enumeration") {
    const u64 n = 500;
    const auto sp = SegParams::make(n, 0.025L, IntervalRule::triples);
    const u64 t = isqrt(n) + 1;
    const MuTable mu = mu_up_to(t);
    const auto cell = cell_fn(sp.delta);
    const i64 want = oracle::error_term_naive_triples(n, t, cell, n + sp.s);
    CHECK(error_term_triples(CorrectionJob::streaming(sp, CorrectionMode::triples, t), mu) == want);
    // no admissible triple lies past the window
    CHECK(oracle::error_term_naive_triples(n, t, cell, 3 * n) == want);

    for (int rep = 0; rep < 25; ++rep) {
        const u64 m = uniform(30, 3000);
        const u64 tt = uniform(isqrt(m) + 1, 2 * isqrt(m) + 2);
        const auto p = SegParams::make(m, random_delta(m), IntervalRule::triples);
        const MuTable mt = mu_up_to(tt);
        const i64 w = oracle::error_term_naive_triples(m, tt, cell_fn(p.delta), 3 * m);
        REQUIRE(error_term_triples(CorrectionJob::streaming(p, CorrectionMode::triples, tt, 13), mt) == w);
        auto fs = factorize_interval(m, m + p.s, isqrt(m + p.s) + 1);
        REQUIRE(error_term_triples(CorrectionJob::with_interval(p, CorrectionMode::triples, tt, fs), mt) == w);
    }
    CHECK_THROWS_AS(error_term_triples(CorrectionJob::streaming(sp, CorrectionMode::triples, t), mu_up_to(t - 1)),
                    std::invalid_argument);
}

TEST_CASE("triple error closes the double Moebius identity") {
    for (u64 n : {100, 777, 2000}) {
        const u64 t = isqrt(n) + 1;
        const auto mu = oracle::mu_smooth_naive(t, t);
        const MuTable table = mu_up_to(t);
        std::vector<i64> mu_t(n + 1, 0), one(n + 1, 1);
        for (u64 d = 1; d <= t && d <= n; ++d) mu_t[d] = mu[d];
        const auto conv = oracle::dirichlet_convolve_naive(oracle::dirichlet_convolve_naive(mu_t, mu_t, n), one, n);
        i64 exact = 0;
        for (u64 i = 1; i <= n; ++i) exact += conv[i];
        for (int rep = 0; rep < 8; ++rep) {
            const auto sp = SegParams::make(n, random_delta(n), IntervalRule::triples);
            const u64 kn = sp.kbar_n;
            std::vector<i64> mu_bar(kn + 1, 0);
            for (u64 d = 1; d <= t; ++d) {
                const u64 k = kbar(d, sp.delta);
                if (k <= kn) mu_bar[k] += mu[d];
            }
            const auto ones_u = build_ones_bar(SegmentGrid(sp.delta, kn + 1), kn);
            const std::vector<i64> ones(ones_u.begin(), ones_u.end());
            const auto c = plain_convolve(plain_convolve(mu_bar, mu_bar, kn + 1), ones, kn + 1);
            i64 approx = 0;
            for (u64 k = 0; k <= kn; ++k) approx += c[k];
            const i64 err = error_term_triples(CorrectionJob::streaming(sp, CorrectionMode::triples, t), table);
            REQUIRE(approx - err == exact);
        }
    }
}

TEST_CASE("multi-threshold triples agree with single thresholds") {
    const FixedDelta d = FixedDelta::from_value(0.004L);
    const u64 t = 2000;
    const MuTable mu = mu_up_to(t);
    std::vector<TripleThreshold> ths;
    for (u64 n : {u64{1000}, u64{500000}, u64{500100}, u64{3000000}, u64{1000}, u64{2999000}, u64{12}}) {
        const u64 s = critical_interval_size(n, d, IntervalRule::triples);
        ths.push_back({n, kbar(n, d), s});
    }
    const auto multi = error_term_triples_multi(ths, d, t, mu, 500, 2);
    REQUIRE(multi.size() == ths.size());
    for (std::size_t i = 0; i < ths.size(); ++i) {
        const auto single = error_term_triples_multi(std::span<const TripleThreshold>(&ths[i], 1), d, t, mu);
        CHECK(multi[i] == single[0]);
    }
    CHECK(multi[0] == multi[4]);
    CHECK(error_term_triples_multi({}, d, t, mu).empty());
}
