#include "pcount/error_correction.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

#include "pcount/parallel.hpp"

namespace pcount {

namespace {

// Distinct primes <= bound dividing n, ascending, with their cells.
struct NumberView {
    u64 n = 0;
    unsigned cnt = 0;
    std::array<u64, 15> p{};
    std::array<u64, 15> cell{};
    u32 square_mask = 0;  // bit j: p[j]^2 | n
};

i64 pair_count(const NumberView& v, u64 kmax, const SegmentGrid& grid) {
    const u64 kn = grid.index_of(v.n);
    const u64 need = kn > kmax + 1 ? kn - kmax - 1 : 0;
    if (need > v.cnt) return 0;
    i64 c = 0;
    auto walk = [&](auto&& self, unsigned start, unsigned size, u64 d, u64 cells) -> void {
        if (size >= need && grid.index_of(v.n / d) + cells <= kmax) c += (size & 1) ? -1 : 1;
        for (unsigned j = start; j < v.cnt; ++j) {
            if (size + (v.cnt - j) < need) break;
            if (cells + v.cell[j] > kmax) break;
            self(self, j + 1, size + 1, d * v.p[j], cells + v.cell[j]);
        }
    };
    walk(walk, 0, 0, 1, 0);
    return c;
}

struct Divisor {
    u64 d;
    u32 mask;
    u64 cell;
    int mu;
};

i64 triple_count(const NumberView& v, u64 kmax, const SegmentGrid& grid, const MuTable& mu, u64 t,
                 std::vector<Divisor>& subs) {
    subs.clear();
    auto gen = [&](auto&& self, unsigned start, u64 d, u32 mask) -> void {
        subs.push_back({d, mask, grid.index_of(d), mu(d)});
        for (unsigned j = start; j < v.cnt; ++j) {
            if (d > t / v.p[j]) break;
            self(self, j + 1, d * v.p[j], mask | (u32{1} << j));
        }
    };
    gen(gen, 0, 1, 0);
    i64 c = 0;
    for (const auto& a : subs) {
        if (a.mu == 0 || a.cell > kmax) continue;
        for (const auto& b : subs) {
            if (b.mu == 0 || ((a.mask & b.mask) & ~v.square_mask) != 0) continue;
            if (a.cell + b.cell > kmax) continue;
            const u64 d1 = v.n / (a.d * b.d);
            if (grid.index_of(d1) + a.cell + b.cell <= kmax) c += a.mu * b.mu;
        }
    }
    return c;
}

// Views from block-sieve rows.
struct RowDecoder {
    std::span<const u64> primes;
    std::span<const u64> cells;

    void decode(const u32* row, u64 n, NumberView& v) const {
        v.n = n;
        v.cnt = row[0];
        v.square_mask = 0;
        for (unsigned j = 0; j < v.cnt; ++j) {
            const u32 s = row[j + 1];
            const u32 idx = s & BlockSieve::index_mask;
            v.p[j] = primes[idx];
            v.cell[j] = cells[idx];
            if (s & BlockSieve::square_flag) v.square_mask |= u32{1} << j;
        }
    }
};

NumberView view_from_factors(const FactoredNumber& f, u64 bound, const KbarEvaluator& kb) {
    NumberView v;
    v.n = f.n;
    for (const auto& pp : f.factors) {
        if (pp.prime > bound) continue;
        v.p[v.cnt] = pp.prime;
        v.cell[v.cnt] = kb(pp.prime);
        if (pp.exponent >= 2) v.square_mask |= u32{1} << v.cnt;
        ++v.cnt;
    }
    return v;
}

std::vector<u64> cells_of(std::span<const u64> primes, FixedDelta delta) {
    const KbarEvaluator kb(delta);
    std::vector<u64> out(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) out[i] = kb(primes[i]);
    return out;
}

u64 grid_top(const SegParams& p) { return kbar(p.n + p.s, p.delta) + 1; }

}  // namespace

CorrectionJob CorrectionJob::streaming(const SegParams& params, CorrectionMode mode, u64 smooth_bound,
                                       std::size_t chunk, unsigned threads) {
    if (chunk == 0) throw std::invalid_argument("correction: chunk must be positive");
    if (params.n > (u64{1} << 62) || params.s > (u64{1} << 62))
        throw std::invalid_argument("correction: interval beyond supported word range");
    CorrectionJob j;
    j.params_ = params;
    j.mode_ = mode;
    j.bound_ = smooth_bound;
    j.chunk_ = chunk;
    j.threads_ = std::max(1u, threads);
    return j;
}

CorrectionJob CorrectionJob::with_interval(const SegParams& params, CorrectionMode mode, u64 smooth_bound,
                                           std::vector<FactoredNumber> interval) {
    if (interval.size() != params.s) throw std::invalid_argument("correction: interval does not cover (N, N+S]");
    for (std::size_t i = 0; i < interval.size(); ++i) {
        const auto& f = interval[i];
        if (f.n != params.n + 1 + i) throw std::invalid_argument("correction: interval does not cover (N, N+S]");
        if (!f.complete) throw std::invalid_argument("correction: incomplete factorization");
        u128 prod = 1;
        for (const auto& pp : f.factors)
            for (u32 e = 0; e < pp.exponent; ++e) prod *= pp.prime;
        if (prod != f.n) throw std::invalid_argument("correction: incomplete factorization");
    }
    CorrectionJob j = streaming(params, mode, smooth_bound);
    j.interval_ = std::move(interval);
    return j;
}

PairError error_term_pairs(const CorrectionJob& job, std::span<const BoundWeight> weights,
                           const ResidueFilter& filter) {
    if (job.mode() != CorrectionMode::pairs) throw std::invalid_argument("error_term_pairs: job is not in pair mode");
    const SegParams& sp = job.params();
    PairError result;
    result.weighted.assign(weights.size(), 0);
    if (sp.s == 0) return result;
    const SegmentGrid grid(sp.delta, grid_top(sp));
    const u64 kmax = sp.kbar_n;

    auto add = [&](PairError& acc, u64 n, i64 c) {
        acc.unit += c;
        for (std::size_t w = 0; w < weights.size(); ++w) {
            const Montgomery& f = weights[w].field();
            const u64 term = f.mul(weights[w].at(n), f.reduce_signed(c));
            acc.weighted[w] = f.add(acc.weighted[w], term);
        }
    };

    if (job.interval()) {
        const KbarEvaluator kb(sp.delta);
        for (const auto& f : *job.interval()) {
            if (!filter.accepts(f.n)) continue;
            const i64 c = pair_count(view_from_factors(f, job.smooth_bound(), kb), kmax, grid);
            if (c != 0) add(result, f.n, c);
        }
        return result;
    }

    const auto primes = primes_up_to(job.smooth_bound());
    const auto cells = cells_of(primes, sp.delta);
    const BlockSieve sieve(primes);
    const RowDecoder dec{primes, cells};
    const std::size_t chunk = job.chunk();
    const std::size_t items = static_cast<std::size_t>((sp.s + chunk - 1) / chunk);
    std::vector<PairError> partial(items, PairError{0, std::vector<u64>(weights.size(), 0)});

    parallel_blocks(items, job.threads(), [&](std::size_t begin, std::size_t end, unsigned) {
        std::vector<u32> rows;
        NumberView v;
        for (std::size_t it = begin; it < end; ++it) {
            const u64 a = sp.n + static_cast<u64>(it) * chunk;
            const u64 b = std::min<u64>(sp.n + sp.s, a + chunk);
            sieve.sieve(a, b, rows);
            for (u64 n = a + 1; n <= b; ++n) {
                if (!filter.accepts(n)) continue;
                dec.decode(rows.data() + (n - a - 1) * BlockSieve::row_width, n, v);
                const i64 c = pair_count(v, kmax, grid);
                if (c != 0) add(partial[it], n, c);
            }
        }
    });

    for (const auto& p : partial) {
        result.unit += p.unit;
        for (std::size_t w = 0; w < weights.size(); ++w)
            result.weighted[w] = weights[w].field().add(result.weighted[w], p.weighted[w]);
    }
    return result;
}

i64 error_term_triples(const CorrectionJob& job, const MuTable& mu) {
    if (job.mode() != CorrectionMode::triples)
        throw std::invalid_argument("error_term_triples: job is not in triple mode");
    const SegParams& sp = job.params();
    const u64 t = job.smooth_bound();
    if (mu.limit() < t) throw std::invalid_argument("error_term_triples: Moebius table shorter than T");
    if (sp.s == 0) return 0;
    if (job.interval()) {
        const SegmentGrid grid(sp.delta, grid_top(sp));
        const KbarEvaluator kb(sp.delta);
        std::vector<Divisor> subs;
        i64 total = 0;
        for (const auto& f : *job.interval())
            total += triple_count(view_from_factors(f, t, kb), sp.kbar_n, grid, mu, t, subs);
        return total;
    }
    const TripleThreshold th{sp.n, sp.kbar_n, sp.s};
    return error_term_triples_multi(std::span<const TripleThreshold>(&th, 1), sp.delta, t, mu, job.chunk(),
                                    job.threads())[0];
}

std::vector<i64> error_term_triples_multi(std::span<const TripleThreshold> thresholds, FixedDelta delta, u64 t,
                                          const MuTable& mu, std::size_t chunk, unsigned threads) {
    if (mu.limit() < t) throw std::invalid_argument("error_term_triples: Moebius table shorter than T");
    if (chunk == 0) throw std::invalid_argument("correction: chunk must be positive");
    std::vector<i64> out(thresholds.size(), 0);

    std::vector<std::size_t> order;
    u64 top = 1, kmax_all = 0;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i].s == 0) continue;
        order.push_back(i);
        top = std::max(top, thresholds[i].n + thresholds[i].s);
        kmax_all = std::max(kmax_all, thresholds[i].kbar_n);
    }
    if (order.empty()) return out;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return thresholds[x].n != thresholds[y].n ? thresholds[x].n < thresholds[y].n : x < y;
    });

    const auto primes = primes_up_to(t);
    const auto cells = cells_of(primes, delta);
    const BlockSieve sieve(primes);
    const RowDecoder dec{primes, cells};
    const SegmentGrid grid(delta, std::max(kmax_all + 4, kbar(top, delta) + 1));

    // Clusters of intervals whose gaps are cheaper to sieve through than to restart on.
    struct Cluster {
        u64 a, b;  // (a, b]
        std::size_t first, last;
    };
    const u64 gap = 4 * static_cast<u64>(primes.size()) + 64;
    std::vector<Cluster> clusters;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& th = thresholds[order[k]];
        const u64 a = th.n, b = th.n + th.s;
        if (!clusters.empty() && a <= clusters.back().b + gap) {
            clusters.back().b = std::max(clusters.back().b, b);
            clusters.back().last = k + 1;
        } else {
            clusters.push_back({a, b, k, k + 1});
        }
    }

    struct Item {
        u64 a, b;
        std::size_t cluster;
    };
    std::vector<Item> items;
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (u64 a = clusters[c].a; a < clusters[c].b; a += std::min<u64>(chunk, clusters[c].b - a))
            items.push_back({a, std::min<u64>(clusters[c].b, a + chunk), c});

    std::vector<std::vector<std::pair<std::size_t, i64>>> partial(items.size());
    parallel_blocks(items.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
        std::vector<u32> rows;
        std::vector<Divisor> subs;
        NumberView v;
        for (std::size_t it = begin; it < end; ++it) {
            const Item& item = items[it];
            sieve.sieve(item.a, item.b, rows);
            const Cluster& cl = clusters[item.cluster];
            for (std::size_t k = cl.first; k < cl.last; ++k) {
                const std::size_t idx = order[k];
                const auto& th = thresholds[idx];
                const u64 lo = std::max(item.a, th.n), hi = std::min(item.b, th.n + th.s);
                if (lo >= hi) continue;
                i64 sum = 0;
                for (u64 n = lo + 1; n <= hi; ++n) {
                    dec.decode(rows.data() + (n - item.a - 1) * BlockSieve::row_width, n, v);
                    sum += triple_count(v, th.kbar_n, grid, mu, t, subs);
                }
                if (sum != 0) partial[it].emplace_back(idx, sum);
            }
        }
    });
    for (const auto& p : partial)
        for (const auto& [idx, v] : p) out[idx] += v;
    return out;
}

}  // namespace pcount
