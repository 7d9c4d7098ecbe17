#pragma once

// Log-scale segmentation: cell maps kbar/khat, the ones array and the critical interval.
//
// log2 is evaluated as T(n) = floor(2^64 * log2 n) exactly, so T(a) + T(b) <= T(ab)
// and kbar(a) + kbar(b) <= kbar(ab) hold without exception.

#include <cstddef>
#include <span>
#include <vector>

#include "pcount/types.hpp"

namespace pcount {

/// Segmentation precision stored as raw = Delta * 2^96.
struct FixedDelta {
    u128 raw = 0;

    static FixedDelta from_value(long double delta);
    long double value() const;
    bool operator==(const FixedDelta&) const = default;
};

/// floor(2^64 * log2 n), exact; n >= 1.
u128 log2_fixed(u64 n);

/// Same value computed entirely in wide multiprecision arithmetic.
u128 log2_fixed_wide(u64 n);

/// c * log2(N) / sqrt(N); N >= 2.
long double delta_default(u64 n, long double scale = 1.0L);

/// delta_default capped at 0.15 / log2 N so that Delta * log2 N < 1/4 holds.
long double pipeline_delta(u64 n, long double scale = 1.0L);

/// Exact floor(log2 n / Delta) under the fixed-point log.
u64 kbar(u64 n, FixedDelta delta);

/// Sum of exponent * kbar(prime).
u64 khat(std::span<const PrimePower> factors, FixedDelta delta);

/// kbar with a floating-point fast path; identical results to kbar().
class KbarEvaluator {
public:
    explicit KbarEvaluator(FixedDelta delta);
    u64 operator()(u64 n) const;
    FixedDelta delta() const { return delta_; }

private:
    FixedDelta delta_;
    long double inv_;
};

enum class IntervalRule {
    pairs,         // closed-form bound for the pair error term
    pairs_shrunk,  // tighter bound from the largest possible omega of a smooth divisor
    triples,       // every n with kbar(n) <= kbar(N) + 3
};

/// Length S of the critical interval (N, N+S].
/// smooth_bound is the p_max limit on divisors and only matters for pairs_shrunk.
u64 critical_interval_size(u64 n, FixedDelta delta, IntervalRule rule, u64 smooth_bound = 0);

struct SegParams {
    u64 n = 0;
    FixedDelta delta;
    u64 kbar_n = 0;
    u64 s = 0;
    IntervalRule rule = IntervalRule::pairs;

    /// Validates 0 < Delta <= 1/2 and Delta * log2 N < 1/4.
    static SegParams make(u64 n, long double delta, IntervalRule rule = IntervalRule::pairs,
                          u64 smooth_bound = 0);
    static SegParams make(u64 n, FixedDelta delta, IntervalRule rule = IntervalRule::pairs,
                          u64 smooth_bound = 0);
};

/// Cell boundaries bound[k] = min{n : kbar(n) >= k} for k = 0..kmax+1.
class SegmentGrid {
public:
    SegmentGrid(FixedDelta delta, u64 kmax);

    u64 kmax() const { return kmax_; }
    FixedDelta delta() const { return eval_.delta(); }
    /// First integer of cell k, k <= kmax + 1.
    u64 lower(u64 k) const { return bound_[k]; }
    std::span<const u64> bounds() const { return bound_; }

    /// kbar(m) for any m >= 1.
    u64 index_of(u64 m) const;

private:
    KbarEvaluator eval_;
    u64 kmax_;
    double inv_;
    std::vector<u64> bound_;
};

/// ones[k] = #{n : kbar(n) = k}, k = 0..kbar(N).
std::vector<u64> build_ones_bar(const SegParams& params);
std::vector<u64> build_ones_bar(const SegmentGrid& grid, u64 kmax);

}  // namespace pcount
