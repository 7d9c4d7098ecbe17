#include "pcount/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "pcount/error_correction.hpp"
#include "pcount/parallel.hpp"
#include "pcount/segmentation.hpp"
#include "pcount/smooth_mobius.hpp"

namespace pcount {

namespace {

using Clock = std::chrono::steady_clock;

class PhaseClock {
public:
    explicit PhaseClock(ResultBundle& b) : bundle_(b), last_(Clock::now()) {}
    void mark(const std::string& name) {
        const auto now = Clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        for (auto& [k, v] : bundle_.phases)
            if (k == name) {
                v += ms;
                return;
            }
        bundle_.phases.emplace_back(name, ms);
    }

private:
    ResultBundle& bundle_;
    Clock::time_point last_;
};

void check_n(u64 n) {
    if (n > max_supported_n)
        throw std::invalid_argument("N = " + std::to_string(n) + " exceeds the supported maximum " +
                                    std::to_string(max_supported_n));
}

bool use_direct(u64 n, const Config& c) { return n < std::max<u64>(c.small_cutoff, 4); }

u64 ceil_sqrt(u64 n) {
    const u64 r = isqrt(n);
    return r * r == n ? r : r + 1;
}

u64 ceil_cbrt(u64 n) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r * r >= n) --r;
    while (static_cast<u128>(r) * r * r < n) ++r;
    return r;
}

long double clamp_delta(long double d, u64 x) {
    const long double lg = std::log2(static_cast<long double>(std::max<u64>(x, 2)));
    return std::min({d, 0.2L / lg, 0.5L});
}

// Delta for the Moebius triple convolution: log2 X / T, capped like the prime pipeline.
long double mertens_delta(u64 x, u64 t, const Config& c) {
    const long double lg = std::log2(static_cast<long double>(std::max<u64>(x, 2)));
    const long double d = c.delta_scale * std::min(lg / static_cast<long double>(t), 1.0L / (10.0L * lg));
    return clamp_delta(d, x);
}

unsigned outer_threads(const Config& c) { return c.threads >= 2 ? 2 : 1; }
unsigned inner_threads(const Config& c) { return std::max(1u, c.threads / outer_threads(c)); }

// h-bar: sum of h over each cell k <= K.
SegArray weight_bar(const SegmentGrid& grid, u64 kmax, const BoundWeight& bw) {
    const Montgomery& f = bw.field();
    SegArray out(kmax + 1, 0);
    if (bw.weight().kind() == MultiplicativeWeight::Kind::unit) {
        for (u64 k = 0; k <= kmax; ++k) out[k] = f.reduce(grid.lower(k + 1) - grid.lower(k));
        return out;
    }
    u64 prev = 0;
    for (u64 k = 0; k <= kmax; ++k) {
        const u64 cur = bw.prefix(grid.lower(k + 1) - 1);
        out[k] = f.sub(cur, prev);
        prev = cur;
    }
    return out;
}

// Sum over k <= K of (h-bar * mu-hat)[k] in one field.
u64 segmented_sum(const SegParams& sp, const SegmentGrid& grid, std::span<const u64> primes, const BoundWeight& bw,
                  const Config& c, unsigned threads) {
    const Montgomery& f = bw.field();
    const SegArray hbar = weight_bar(grid, sp.kbar_n, bw);
    const SegArray mu = mu_hat_partitioned(primes, bw, sp.n, sp.delta, sp.kbar_n, {c.partition, threads});
    const auto conv = multiply(hbar, mu, f, sp.kbar_n + 1);
    u64 total = 0;
    for (u64 v : conv) total = f.add(total, v);
    return total;
}

SegParams prime_params(u64 n, const Config& c) {
    const long double d = clamp_delta(pipeline_delta(n, c.delta_scale), n);
    const IntervalRule rule = c.shrink_interval ? IntervalRule::pairs_shrunk : IntervalRule::pairs;
    return SegParams::make(n, d, rule, isqrt(n));
}

void fill_params(ResultBundle& b, const SegParams& sp, const ModulusPair& mp) {
    b.n = sp.n;
    b.delta = sp.delta.value();
    b.s = sp.s;
    b.moduli = mp;
}

ResultBundle direct_bundle(const std::string& fn, u64 n, i128 value, const Clock::time_point& start) {
    ResultBundle b;
    b.function = fn;
    b.n = n;
    b.value = value;
    b.direct = true;
    b.phases.emplace_back("direct", std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    return b;
}

i128 power_sum_direct(std::span<const u64> primes, unsigned ell) {
    i128 total = 0;
    for (u64 p : primes) {
        i128 t = 1;
        for (unsigned i = 0; i < ell; ++i) t *= p;
        total += t;
    }
    return total;
}

u64 power_sum_mod(std::span<const u64> primes, unsigned ell, const Montgomery& f) {
    u64 total = 0;
    for (u64 p : primes) total = f.add(total, f.pow(f.reduce(p), ell));
    return total;
}

std::vector<std::int32_t> mertens_prefix(const MuTable& mu) {
    std::vector<std::int32_t> m(mu.limit() + 1, 0);
    for (u64 i = 1; i <= mu.limit(); ++i) m[i] = m[i - 1] + mu(i);
    return m;
}

}  // namespace

void Config::validate() const {
    if (!(delta_scale > 0)) throw std::invalid_argument("delta scale must be positive");
    if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
    if (chunk == 0) throw std::invalid_argument("chunk size must be positive");
}

double ResultBundle::total_ms() const {
    double t = 0;
    for (const auto& [k, v] : phases) t += v;
    return t;
}

ResultBundle count_primes(u64 n, const Config& config) {
    ResultBundle b = sum_over_primes(n, MultiplicativeWeight::unit(), config);
    b.function = "pi";
    return b;
}

ResultBundle sum_over_primes(u64 n, const MultiplicativeWeight& weight, const Config& config) {
    config.validate();
    check_n(n);
    if (weight.kind() == MultiplicativeWeight::Kind::character)
        throw std::invalid_argument("sum_over_primes: character weights have non-integer sums; use count_primes_mod");
    const unsigned ell = weight.kind() == MultiplicativeWeight::Kind::power ? weight.power_exponent() : 0;
    const bool unit = ell == 0;
    const std::string fn = unit ? "pi" : "sum-primes";
    const auto start = Clock::now();

    if (!unit) {
        // |sum p^l| < N^(l+1) must sit below half the modulus product.
        const long double bits = (ell + 1.0L) * std::log2(static_cast<long double>(std::max<u64>(n, 2)));
        if (bits >= 122.0L) throw range_error("sum_over_primes: result may exceed the CRT range");
    }
    if (use_direct(n, config)) {
        const auto primes = primes_up_to(n);
        return direct_bundle(fn, n, power_sum_direct(primes, ell), start);
    }

    ResultBundle b;
    b.function = fn;
    PhaseClock clock(b);
    const SegParams sp = prime_params(n, config);
    const ModulusPair mp = select_moduli(1, config.pool);
    fill_params(b, sp, mp);
    const u64 bound = isqrt(n);
    const auto primes = primes_up_to(bound);
    const SegmentGrid grid(sp.delta, sp.kbar_n);
    const MultiplicativeWeight w = unit ? MultiplicativeWeight::unit() : MultiplicativeWeight::power(ell);
    std::vector<BoundWeight> bws;
    for (u64 p : mp.primes) bws.emplace_back(w, Montgomery(p));
    clock.mark("sieve");

    std::array<u64, 2> approx{};
    parallel_blocks(2, outer_threads(config), [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t i = lo; i < hi; ++i)
            approx[i] = segmented_sum(sp, grid, primes, bws[i], config, inner_threads(config));
    });
    clock.mark("convolution");

    const auto job = CorrectionJob::streaming(sp, CorrectionMode::pairs, bound, config.chunk, config.threads);
    const std::span<const BoundWeight> wspan = unit ? std::span<const BoundWeight>{} : std::span<const BoundWeight>(bws);
    const PairError err = error_term_pairs(job, wspan);
    clock.mark("correction");

    if (unit) {
        b.value = mp.lift(approx[0], approx[1]) - err.unit - 1 + static_cast<i128>(primes.size());
    } else {
        std::array<u64, 2> r{};
        for (std::size_t i = 0; i < 2; ++i) {
            const Montgomery& f = bws[i].field();
            r[i] = f.add(f.sub(f.sub(approx[i], err.weighted[i]), 1 % f.modulus()), power_sum_mod(primes, ell, f));
        }
        b.value = mp.lift(r[0], r[1]);
    }
    return b;
}

ResultBundle count_primes_mod(u64 n, u64 m, u64 r, const Config& config) {
    config.validate();
    check_n(n);
    if (m == 0) throw std::invalid_argument("count_primes_mod: modulus must be positive");
    if (m > max_residue_modulus)
        throw unsupported_modulus("count_primes_mod: modulus above " + std::to_string(max_residue_modulus));
    r %= m;
    if (std::gcd(m, r) != 1) throw std::invalid_argument("count_primes_mod: residue not coprime to modulus");
    if (m == 1) {
        ResultBundle b = count_primes(n, config);
        b.function = "pi-mod";
        return b;
    }
    const auto start = Clock::now();
    if (use_direct(n, config)) {
        i128 count = 0;
        for (u64 p : primes_up_to(n)) count += (p % m == r) ? 1 : 0;
        return direct_bundle("pi-mod", n, count, start);
    }

    ResultBundle b;
    b.function = "pi-mod";
    PhaseClock clock(b);
    const auto group = std::make_shared<const CharacterGroup>(m);
    const u64 phi = group->phi();
    const SegParams sp = prime_params(n, config);
    const ModulusPair mp = select_moduli(phi, config.pool);
    fill_params(b, sp, mp);
    const u64 bound = isqrt(n);
    const auto primes = primes_up_to(bound);
    const SegmentGrid grid(sp.delta, sp.kbar_n);
    clock.mark("sieve");

    // (1/phi) sum_j conj(chi_j(r)) * approx_j, per field
    std::array<u64, 2> combined{};
    parallel_blocks(2, outer_threads(config), [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Montgomery f(mp.primes[i]);
            u64 acc = 0;
            for (u64 j = 0; j < phi; ++j) {
                const BoundWeight bw(MultiplicativeWeight::character(group, j), f);
                const u64 s = segmented_sum(sp, grid, primes, bw, config, inner_threads(config));
                acc = f.add(acc, f.mul(f.inv(bw.at(r)), s));
            }
            combined[i] = f.mul(acc, f.inv(f.reduce(phi)));
        }
    });
    clock.mark("convolution");

    const auto job = CorrectionJob::streaming(sp, CorrectionMode::pairs, bound, config.chunk, config.threads);
    const i64 err = error_term_pairs(job, {}, ResidueFilter{m, r}).unit;
    clock.mark("correction");

    i128 small = 0;
    for (u64 p : primes) small += (p % m == r) ? 1 : 0;
    b.value = mp.lift(combined[0], combined[1]) - (r == 1 ? 1 : 0) - err + small;
    return b;
}

MultiResult mertens_multi(std::span<const u64> thresholds, u64 t, const Config& config) {
    config.validate();
    if (t == 0) throw std::invalid_argument("mertens_multi: T must be positive");
    if (t > (u64{1} << 32))
        throw std::invalid_argument("mertens_multi: T beyond the sieve range");
    for (u64 x : thresholds) {
        check_n(x);
        if (static_cast<u128>(x) > static_cast<u128>(t) * t)
            throw std::invalid_argument("mertens_multi: threshold " + std::to_string(x) + " exceeds T^2");
    }
    MultiResult out;
    out.values.assign(thresholds.size(), 0);
    out.info.function = "mertens";
    if (thresholds.empty()) return out;
    const auto start = Clock::now();
    const u64 top = *std::max_element(thresholds.begin(), thresholds.end());
    out.info.n = top;

    if (use_direct(top, config) || top <= t) {
        const auto mu = mu_up_to(top);
        const auto pre = mertens_prefix(mu);
        for (std::size_t i = 0; i < thresholds.size(); ++i) out.values[i] = pre[thresholds[i]];
        out.info = direct_bundle("mertens", top, 0, start);
        return out;
    }

    ResultBundle& b = out.info;
    PhaseClock clock(b);
    const MuTable mu = mu_up_to(t);
    const auto pre_t = mertens_prefix(mu);
    const long double dv = mertens_delta(top, t, config);
    const FixedDelta delta = FixedDelta::from_value(dv);

    // thresholds above T go through the convolution; the rest are read from the table
    std::vector<u64> big;
    for (u64 x : thresholds)
        if (x > t) big.push_back(x);
    std::sort(big.begin(), big.end());
    big.erase(std::unique(big.begin(), big.end()), big.end());
    std::vector<TripleThreshold> th;
    th.reserve(big.size());
    for (u64 x : big) {
        const SegParams sp = SegParams::make(x, delta, IntervalRule::triples);
        th.push_back({sp.n, sp.kbar_n, sp.s});
        b.s += sp.s;
    }
    const u64 kmax = kbar(top, delta);
    const SegmentGrid grid(delta, kmax);
    const ModulusPair mp = select_moduli(1, config.pool);
    b.delta = delta.value();
    b.moduli = mp;
    clock.mark("sieve");

    // per field: prefix sums of (mu-bar_T * mu-bar_T * 1-bar)
    const u64 kt = std::min(kbar(t, delta), kmax);
    std::array<std::vector<u64>, 2> prefix;
    parallel_blocks(2, outer_threads(config), [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Montgomery f(mp.primes[i]);
            SegArray mubar(kt + 1, 0), ones(kmax + 1, 0);
            for (u64 k = 0; k <= kt; ++k) {
                const u64 a = grid.lower(k), z = std::min(grid.lower(k + 1) - 1, t);
                if (a <= z) mubar[k] = f.reduce_signed(pre_t[z] - pre_t[a - 1]);
            }
            for (u64 k = 0; k <= kmax; ++k) ones[k] = f.reduce(grid.lower(k + 1) - grid.lower(k));
            const auto sq = multiply(mubar, mubar, f, kmax + 1);
            auto conv = multiply(sq, ones, f, kmax + 1);
            conv.resize(kmax + 1, 0);
            for (u64 k = 1; k <= kmax; ++k) conv[k] = f.add(conv[k], conv[k - 1]);
            prefix[i] = std::move(conv);
        }
    });
    clock.mark("convolution");

    const auto errs = error_term_triples_multi(th, delta, t, mu, config.chunk, config.threads);
    clock.mark("correction");

    const i64 mt2 = 2 * static_cast<i64>(pre_t[t]);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const u64 x = thresholds[i];
        if (x <= t) {
            out.values[i] = pre_t[x];
            continue;
        }
        const std::size_t j = std::lower_bound(big.begin(), big.end(), x) - big.begin();
        const u64 k = th[j].kbar_n;
        const i128 approx = mp.lift(prefix[0][k], prefix[1][k]);
        out.values[i] = static_cast<i64>(mt2 - (approx - errs[j]));
    }
    return out;
}

ResultBundle mertens(u64 n, const Config& config) {
    config.validate();
    check_n(n);
    const auto start = Clock::now();
    if (n == 0) return direct_bundle("mertens", 0, 0, start);
    const u64 x[] = {n};
    MultiResult r = mertens_multi(x, ceil_sqrt(n), config);
    r.info.value = r.values[0];
    r.info.n = n;
    return r.info;
}

ResultBundle count_squarefree(u64 n, const Config& config) {
    config.validate();
    check_n(n);
    const auto start = Clock::now();
    if (use_direct(n, config)) {
        const u64 root = isqrt(n);
        const MuTable mu = mu_up_to(root);
        i128 total = 0;
        for (u64 d = 1; d <= root; ++d) total += static_cast<i128>(mu(d)) * (n / (d * d));
        return direct_bundle("squarefree", n, total, start);
    }

    // sum_t M(sqrt(N/t)): t >= t0 by the d-sum with d <= D, t < t0 by one shared convolution
    const u64 dcap = ceil_cbrt(n);
    const u64 t0 = (n + dcap * dcap - 1) / (dcap * dcap);
    const MuTable mu = mu_up_to(dcap);
    const u64 dmax = isqrt(n / t0);
    i128 total = 0;
    for (u64 d = 1; d <= dmax; ++d) {
        const u64 q = n / (d * d);
        if (q >= t0) total += static_cast<i128>(mu(d)) * (q - t0 + 1);
    }
    const auto t_small = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    std::vector<u64> qs;
    for (u64 t = 1; t < t0; ++t) qs.push_back(isqrt(n / t));
    MultiResult mr = mertens_multi(qs, dcap, config);
    for (i64 v : mr.values) total += v;

    ResultBundle b = mr.info;
    b.function = "squarefree";
    b.n = n;
    b.value = total;
    b.direct = false;
    b.phases.insert(b.phases.begin(), {"direct", t_small});
    return b;
}

ResultBundle totient_sum(u64 n, const Config& config) {
    config.validate();
    check_n(n);
    const auto start = Clock::now();
    if (use_direct(n, config)) {
        std::vector<u64> phi(n + 1);
        std::iota(phi.begin(), phi.end(), u64{0});
        for (u64 p = 2; p <= n; ++p)
            if (phi[p] == p)
                for (u64 j = p; j <= n; j += p) phi[j] -= phi[j] / p;
        i128 total = 0;
        for (u64 i = 1; i <= n; ++i) total += phi[i];
        return direct_bundle("totient-sum", n, total, start);
    }

    // Phi(N) = sum_k k M(N/k), grouped by q = floor(N/k)
    std::vector<u64> qs;
    std::vector<i128> group_weight;
    for (u64 k = 1; k <= n;) {
        const u64 q = n / k;
        const u64 hi = n / q;
        qs.push_back(q);
        group_weight.push_back((static_cast<i128>(k) + hi) * static_cast<i128>(hi - k + 1) / 2);
        k = hi + 1;
    }
    MultiResult mr = mertens_multi(qs, ceil_sqrt(n), config);
    i128 total = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) total += group_weight[i] * mr.values[i];

    ResultBundle b = mr.info;
    b.function = "totient-sum";
    b.n = n;
    b.value = total;
    return b;
}

}  // namespace pcount
