#include "pcount/smooth_mobius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcount/parallel.hpp"

namespace pcount {

namespace {

std::vector<u64> prime_cells(std::span<const u64> primes, FixedDelta delta) {
    const KbarEvaluator kb(delta);
    std::vector<u64> cells(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) cells[i] = kb(primes[i]);
    return cells;
}

SegArray delta_zero(u64 kmax) {
    SegArray d(kmax + 1, 0);
    d[0] = 1;
    return d;
}

}  // namespace

SegArray build_E1(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 kmax) {
    return build_Er(primes, weight, delta, 1, kmax);
}

SegArray build_Er(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 r, u64 kmax) {
    if (r == 0) throw std::invalid_argument("build_Er: r must be positive");
    const Montgomery& f = weight.field();
    const KbarEvaluator kb(delta);
    SegArray e(kmax + 1, 0);
    for (u64 p : primes) {
        const u64 k = kb(p);
        if (k > kmax / r) break;
        e[r * k] = f.add(e[r * k], weight.at_prime_power(p, r));
    }
    return e;
}

SegArray dilate_Er(std::span<const u64> e1, u64 r, std::size_t out_len) {
    if (r == 0) throw std::invalid_argument("dilate_Er: r must be positive");
    SegArray out(out_len, 0);
    for (std::size_t i = 0; i < e1.size() && i < (out_len + r - 1) / r; ++i) out[i * r] = e1[i];
    return out;
}

std::vector<SegArray> newton_direct(std::span<const SegArray> e, u64 r_max, const Montgomery& field, u64 kmax) {
    if (r_max >= field.modulus()) throw std::logic_error("newton_direct: r not invertible in field");
    if (e.size() <= r_max) throw std::invalid_argument("newton_direct: missing E_r arrays");
    std::vector<SegArray> c(r_max + 1);
    c[0] = delta_zero(kmax);
    for (u64 r = 1; r <= r_max; ++r) {
        SegArray acc(kmax + 1, 0);
        for (u64 rp = 1; rp <= r; ++rp) {
            auto prod = multiply(c[r - rp], e[rp], field, kmax + 1);
            for (std::size_t k = 0; k < prod.size(); ++k)
                acc[k] = (rp & 1) ? field.add(acc[k], prod[k]) : field.sub(acc[k], prod[k]);
        }
        const u64 inv_r = field.inv(r);
        for (auto& v : acc) v = field.mul(v, inv_r);
        c[r] = std::move(acc);
    }
    return c;
}

SegArray mu_hat_direct(std::span<const u64> primes, const BoundWeight& weight, FixedDelta delta, u64 kmax) {
    const Montgomery& f = weight.field();
    const auto cells = prime_cells(primes, delta);
    const std::size_t usable = std::upper_bound(cells.begin(), cells.end(), kmax) - cells.begin();
    if (usable == 0) return delta_zero(kmax);
    if (cells[0] == 0) throw std::invalid_argument("mu_hat: a prime falls in cell 0; delta too large");
    const u64 r_max = std::min<u64>(usable, kmax / cells[0]);
    std::vector<SegArray> e(r_max + 1);
    for (u64 r = 1; r <= r_max; ++r) e[r] = build_Er(primes.subspan(0, usable), weight, delta, r, kmax);
    const auto c = newton_direct(e, r_max, f, kmax);
    SegArray mu(kmax + 1, 0);
    for (u64 r = 0; r <= r_max; ++r)
        for (u64 k = 0; k <= kmax; ++k) mu[k] = (r & 1) ? f.sub(mu[k], c[r][k]) : f.add(mu[k], c[r][k]);
    return mu;
}

std::vector<PrimeRange> partition_primes(std::span<const u64> primes, u64 n, FixedDelta delta, u64 kmax,
                                         bool split) {
    const auto cells = prime_cells(primes, delta);
    const std::size_t usable = std::upper_bound(cells.begin(), cells.end(), kmax) - cells.begin();
    if (usable > 0 && cells[0] == 0) throw std::invalid_argument("partition: a prime falls in cell 0; delta too large");
    const long double lg = std::log2(static_cast<long double>(std::max<u64>(n, 2)));

    auto level = [&](u64 p) -> unsigned {
        if (!split) return 1;
        const long double x = std::log2(static_cast<long double>(p));
        unsigned m = 1;
        while (m < 64 && x < lg / std::ldexp(1.0L, static_cast<int>(m) + 1)) ++m;
        return m;
    };

    std::vector<PrimeRange> out;
    std::size_t i = 0;
    while (i < usable) {
        const unsigned m = level(primes[i]);
        std::size_t j = i + 1;
        while (j < usable && level(primes[j]) == m) ++j;
        PrimeRange r;
        r.first = i;
        r.last = j;
        r.r_max = std::min<u64>(j - i, kmax / cells[i]);
        r.length = next_pow2(static_cast<std::size_t>(r.r_max * (cells[j - 1] + 1) + kmax + 1));
        out.push_back(r);
        i = j;
    }
    return out;
}

SegArray mu_hat_range(std::span<const u64> primes, const PrimeRange& range, const BoundWeight& weight,
                      FixedDelta delta, u64 kmax, unsigned threads) {
    const Montgomery& f = weight.field();
    const auto sub = primes.subspan(range.first, range.last - range.first);
    if (sub.empty() || range.r_max == 0) return delta_zero(kmax);
    const u64 r_max = range.r_max;
    const std::size_t len = range.length;
    const auto cells = prime_cells(sub, delta);
    if (r_max * cells.back() >= len) throw std::invalid_argument("mu_hat_range: transform length too short");
    const NttContext& ctx = cached_context(f.modulus(), len);

    // Transformed power-sum arrays. With a finite period o the r-th array is
    // G_j dilated by r, j = (r - 1) mod o + 1, and is read off G_j's transform.
    const u64 period = weight.weight().power_period();
    std::vector<std::vector<u64>> tr;
    const u64 arrays = period > 0 ? std::min(period, r_max) : r_max;
    tr.resize(arrays);
    for (u64 j = 1; j <= arrays; ++j) {
        std::vector<u64> g(len, 0);
        const u64 stretch = period > 0 ? 1 : j;
        for (std::size_t i = 0; i < sub.size(); ++i) {
            const u64 k = stretch * cells[i];
            g[k] = f.add(g[k], weight.at_prime_power(sub[i], j));
        }
        ctx.forward_inplace(g);
        tr[j - 1] = std::move(g);
    }

    std::vector<u64> inv_mont(r_max + 1, 0);
    for (u64 r = 1; r <= r_max; ++r) inv_mont[r] = f.to_mont(f.inv(r));
    std::vector<u64> values(len);
    const std::size_t mask = len - 1;

    parallel_blocks(len, threads, [&](std::size_t begin, std::size_t end, unsigned) {
        std::vector<u64> e(r_max + 1), c(r_max + 1);
        for (std::size_t l = begin; l < end; ++l) {
            for (u64 r = 1; r <= r_max; ++r) {
                const u64 x = period > 0 ? tr[(r - 1) % period][(l * r) & mask] : tr[r - 1][l];
                e[r] = f.to_mont((r & 1) ? x : f.neg(x));
            }
            c[0] = f.mont_one();
            u64 total = c[0];
            for (u64 r = 1; r <= r_max; ++r) {
                u64 acc = 0;
                for (u64 rp = 1; rp <= r; ++rp) acc = f.add(acc, f.mont_mul(e[rp], c[r - rp]));
                c[r] = f.mont_mul(acc, inv_mont[r]);
                total = (r & 1) ? f.sub(total, c[r]) : f.add(total, c[r]);
            }
            values[l] = f.from_mont(total);
        }
    });

    ctx.inverse_inplace(values);
    values.resize(kmax + 1 <= len ? kmax + 1 : len);
    values.resize(kmax + 1, 0);
    return values;
}

SegArray mu_hat_partitioned(std::span<const u64> primes, const BoundWeight& weight, u64 n, FixedDelta delta,
                            u64 kmax, const MobiusOptions& options) {
    const auto ranges = partition_primes(primes, n, delta, kmax, options.partition);
    if (ranges.empty()) return delta_zero(kmax);
    std::vector<SegArray> parts;
    parts.reserve(ranges.size());
    for (const auto& r : ranges) parts.push_back(mu_hat_range(primes, r, weight, delta, kmax, options.threads));
    const Montgomery& f = weight.field();
    while (parts.size() > 1) {
        std::vector<SegArray> next;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            auto prod = multiply(parts[i], parts[i + 1], f, kmax + 1);
            prod.resize(kmax + 1, 0);
            next.push_back(std::move(prod));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return parts.front();
}

}  // namespace pcount
