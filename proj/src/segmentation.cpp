#include "pcount/segmentation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace pcount {

namespace {

constexpr long double two64 = 18446744073709551616.0L;

long double to_ld(u128 v) {
    return static_cast<long double>(static_cast<u64>(v >> 64)) * two64 + static_cast<long double>(static_cast<u64>(v));
}

// 256-bit square of y, returned as (hi, lo).
inline void square_wide(u128 y, u128& hi, u128& lo) {
    const u64 a = static_cast<u64>(y >> 64);
    const u64 b = static_cast<u64>(y);
    const u128 aa = static_cast<u128>(a) * a;
    const u128 ab = static_cast<u128>(a) * b;
    const u128 bb = static_cast<u128>(b) * b;
    const u128 ab2 = ab << 1;
    const u64 carry_top = static_cast<u64>(ab >> 127);
    lo = bb + (static_cast<u128>(static_cast<u64>(ab2)) << 64);
    const u64 carry_lo = lo < bb ? 1 : 0;
    hi = aa + (ab2 >> 64) + (static_cast<u128>(carry_top) << 64) + carry_lo;
}

// Same digit-by-digit squaring with a wide mantissa; used when the fast path
// cannot decide the 64th fractional bit.
u64 log2_fraction_wide(u64 n, unsigned e) {
    using boost::multiprecision::cpp_int;
    constexpr unsigned width = 480;
    constexpr unsigned digits = 192;
    const cpp_int two_w1 = cpp_int(1) << (2 * width + 1);
    cpp_int y = cpp_int(n) << (width - e);
    cpp_int r = 0;
    for (unsigned i = 0; i < digits; ++i) {
        cpp_int z = y * y;
        r <<= 1;
        if (z >= two_w1) {
            r |= 1;
            y = z >> (width + 1);
        } else {
            y = z >> width;
        }
    }
    const unsigned guard_bits = digits - 64;
    const cpp_int guard = r & ((cpp_int(1) << guard_bits) - 1);
    if (guard >= (cpp_int(1) << guard_bits) - 16) throw std::runtime_error("log2_fixed: unresolved rounding");
    return static_cast<u64>(r >> guard_bits);
}

u64 first_with_kbar_at_least(u64 k, const KbarEvaluator& eval) {
    if (k == 0) return 1;
    const long double target = static_cast<long double>(k) * eval.delta().value();
    if (target >= 63.0L) throw range_error("segment boundary beyond 64-bit range");
    u64 n = static_cast<u64>(std::ceil(std::exp2(target)));
    if (n < 1) n = 1;
    while (eval(n) < k) ++n;
    while (n > 1 && eval(n - 1) >= k) --n;
    return n;
}

}  // namespace

FixedDelta FixedDelta::from_value(long double delta) {
    if (!(delta > 0.0L) || delta > 1.0L) throw std::invalid_argument("delta must be in (0, 1]");
    const long double scaled = std::ldexp(delta, 96);
    const long double hi = std::floor(scaled / two64);
    const long double lo = scaled - hi * two64;
    FixedDelta d;
    d.raw = (static_cast<u128>(static_cast<u64>(hi)) << 64) + static_cast<u64>(lo);
    if (d.raw == 0) throw std::invalid_argument("delta underflows fixed point");
    return d;
}

long double FixedDelta::value() const { return std::ldexp(to_ld(raw), -96); }

u128 log2_fixed(u64 n) {
    if (n == 0) throw std::invalid_argument("log2 of zero");
    const unsigned e = 63 - static_cast<unsigned>(std::countl_zero(n));
    const u128 whole = static_cast<u128>(e) << 64;
    if ((n & (n - 1)) == 0) return whole;
    u128 y = static_cast<u128>(n) << (127 - e);
    u128 r = 0;
    for (int i = 0; i < 96; ++i) {
        u128 hi, lo;
        square_wide(y, hi, lo);
        r <<= 1;
        if (hi >> 127) {
            r |= 1;
            y = hi;
        } else {
            y = (hi << 1) | (lo >> 127);
        }
    }
    const u64 guard = static_cast<u64>(r) & 0xFFFFFFFFULL;
    if (guard < 0xFFFFFFF0ULL) return whole | static_cast<u64>(r >> 32);
    return whole | log2_fraction_wide(n, e);
}

u128 log2_fixed_wide(u64 n) {
    if (n == 0) throw std::invalid_argument("log2 of zero");
    const unsigned e = 63 - static_cast<unsigned>(std::countl_zero(n));
    const u128 whole = static_cast<u128>(e) << 64;
    if ((n & (n - 1)) == 0) return whole;
    return whole | log2_fraction_wide(n, e);
}

long double delta_default(u64 n, long double scale) {
    if (n < 2) throw std::invalid_argument("delta_default: N must be at least 2");
    if (!(scale > 0.0L)) throw std::invalid_argument("delta scale must be positive");
    const long double x = static_cast<long double>(n);
    return scale * std::log2(x) / std::sqrt(x);
}

long double pipeline_delta(u64 n, long double scale) {
    if (n < 2) throw std::invalid_argument("pipeline_delta: N must be at least 2");
    if (!(scale > 0.0L)) throw std::invalid_argument("delta scale must be positive");
    const long double x = static_cast<long double>(n);
    const long double lg = std::log2(x);
    return scale * std::min(lg / std::sqrt(x), 0.15L / lg);
}

u64 kbar(u64 n, FixedDelta delta) {
    if (n == 0) throw std::invalid_argument("kbar of zero");
    return static_cast<u64>((log2_fixed(n) << 32) / delta.raw);
}

u64 khat(std::span<const PrimePower> factors, FixedDelta delta) {
    u64 total = 0;
    for (const auto& f : factors) total += static_cast<u64>(f.exponent) * kbar(f.prime, delta);
    return total;
}

KbarEvaluator::KbarEvaluator(FixedDelta delta) : delta_(delta), inv_(1.0L / delta.value()) {
    if (delta.raw == 0) throw std::invalid_argument("zero delta");
}

u64 KbarEvaluator::operator()(u64 n) const {
    if (n == 0) throw std::invalid_argument("kbar of zero");
    const long double x = std::log2(static_cast<long double>(n)) * inv_;
    const long double f = std::floor(x);
    if (x - f > 1e-6L && f + 1.0L - x > 1e-6L) return static_cast<u64>(f);
    return kbar(n, delta_);
}

u64 critical_interval_size(u64 n, FixedDelta delta, IntervalRule rule, u64 smooth_bound) {
    if (n < 1) throw std::invalid_argument("critical interval: N must be positive");
    const long double d = delta.value();
    const long double lg = std::log2(static_cast<long double>(n));
    if (!(d * lg < 0.25L)) throw std::invalid_argument("critical interval: requires delta * log2 N < 1/4");
    const long double x = static_cast<long double>(n);

    if (rule == IntervalRule::triples) {
        const KbarEvaluator eval(delta);
        const u64 top = first_with_kbar_at_least(eval(n) + 4, eval);
        return top - 1 - n;
    }

    const long double dm = d * (1.0L + 1e-9L);
    auto size_for = [&](long double exponent) -> u64 {
        const long double raw = x * (std::exp2(exponent) - 1.0L);
        if (raw < 1.0L) return 0;
        const long double s = std::ceil(raw * (1.0L + 1e-12L));
        if (s >= 9.2e18L) throw range_error("critical interval exceeds word range");
        return static_cast<u64>(s);
    };
    const u64 s0 = size_for(dm * (2.0L + lg) / (1.0L - dm));
    if (rule == IntervalRule::pairs) return s0;

    // Largest omega of a square-free smooth_bound-smooth divisor of some n <= N + s0.
    const u128 top = static_cast<u128>(n) + s0;
    u128 prod = 1;
    u64 omega = 0;
    for (u64 p = 2; p <= smooth_bound; ++p) {
        bool prime = true;
        for (u64 q = 2; q * q <= p; ++q) {
            if (p % q == 0) {
                prime = false;
                break;
            }
        }
        if (!prime) continue;
        if (prod * p > top) break;
        prod *= p;
        ++omega;
    }
    return std::min(s0, size_for(dm * static_cast<long double>(omega + 1)));
}

SegParams SegParams::make(u64 n, long double delta, IntervalRule rule, u64 smooth_bound) {
    return make(n, FixedDelta::from_value(delta), rule, smooth_bound);
}

SegParams SegParams::make(u64 n, FixedDelta delta, IntervalRule rule, u64 smooth_bound) {
    if (n < 1) throw std::invalid_argument("SegParams: N must be positive");
    if (delta.raw == 0 || delta.raw > (static_cast<u128>(1) << 95))
        throw std::invalid_argument("SegParams: delta must be in (0, 1/2]");
    SegParams p;
    p.n = n;
    p.delta = delta;
    p.kbar_n = kbar(n, delta);
    p.rule = rule;
    p.s = critical_interval_size(n, delta, rule, smooth_bound);
    return p;
}

SegmentGrid::SegmentGrid(FixedDelta delta, u64 kmax)
    : eval_(delta), kmax_(kmax), inv_(static_cast<double>(1.0L / delta.value())), bound_(kmax + 2) {
    bound_[0] = 1;
    for (u64 k = 1; k <= kmax + 1; ++k) {
        u64 n = std::max<u64>(bound_[k - 1], static_cast<u64>(std::ceil(std::exp2(k * delta.value()))));
        while (n > bound_[k - 1] && eval_(n - 1) >= k) --n;
        while (eval_(n) < k) ++n;
        bound_[k] = n;
    }
}

u64 SegmentGrid::index_of(u64 m) const {
    if (m == 0) throw std::invalid_argument("kbar of zero");
    if (m >= bound_[kmax_ + 1]) return eval_(m);
    const double x = std::log2(static_cast<double>(m)) * inv_;
    u64 g = x <= 0.0 ? 0 : std::min<u64>(static_cast<u64>(x), kmax_);
    while (bound_[g + 1] <= m) ++g;
    while (bound_[g] > m) --g;
    return g;
}

std::vector<u64> build_ones_bar(const SegmentGrid& grid, u64 kmax) {
    if (kmax > grid.kmax()) throw std::invalid_argument("build_ones_bar: grid too small");
    std::vector<u64> ones(kmax + 1);
    for (u64 k = 0; k <= kmax; ++k) ones[k] = grid.lower(k + 1) - grid.lower(k);
    return ones;
}

std::vector<u64> build_ones_bar(const SegParams& params) {
    const SegmentGrid grid(params.delta, params.kbar_n);
    return build_ones_bar(grid, params.kbar_n);
}

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::string to_string(i128 v) {
    if (v >= 0) return to_string(static_cast<u128>(v));
    return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
}

}  // namespace pcount
