#pragma once

// Exact error terms between the segmented convolution sums and the true Dirichlet sums.
//
// Pairs:   sum over n in (N, N+S] and square-free d | n with p_max(d) <= B and
//          kbar(n/d) + khat(d) <= kbar(N) of h(n) (-1)^omega(d).
// Triples: sum over n in (N, N+S] and ordered d1 d2 d3 = n with d2, d3 <= T of
//          mu(d2) mu(d3) whenever kbar(d1) + kbar(d2) + kbar(d3) <= kbar(N).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcount/segmentation.hpp"
#include "pcount/sieve.hpp"
#include "pcount/weight.hpp"

namespace pcount {

enum class CorrectionMode { pairs, triples };

struct ResidueFilter {
    u64 modulus = 1;
    u64 residue = 0;
    bool accepts(u64 n) const { return modulus <= 1 || n % modulus == residue % modulus; }
};

class CorrectionJob {
public:
    /// The interval is sieved on the fly in blocks of chunk integers.
    static CorrectionJob streaming(const SegParams& params, CorrectionMode mode, u64 smooth_bound,
                                   std::size_t chunk = default_chunk, unsigned threads = 1);
    /// The interval is supplied; it must be exactly (N, N+S] with complete factorizations.
    static CorrectionJob with_interval(const SegParams& params, CorrectionMode mode, u64 smooth_bound,
                                       std::vector<FactoredNumber> interval);

    const SegParams& params() const { return params_; }
    CorrectionMode mode() const { return mode_; }
    u64 smooth_bound() const { return bound_; }
    std::size_t chunk() const { return chunk_; }
    unsigned threads() const { return threads_; }
    const std::optional<std::vector<FactoredNumber>>& interval() const { return interval_; }

private:
    SegParams params_;
    CorrectionMode mode_ = CorrectionMode::pairs;
    u64 bound_ = 0;
    std::size_t chunk_ = default_chunk;
    unsigned threads_ = 1;
    std::optional<std::vector<FactoredNumber>> interval_;
};

struct PairError {
    i64 unit = 0;                  // the h = 1 error, exact
    std::vector<u64> weighted;     // sum of h(n) c_n, one entry per supplied weight
};

PairError error_term_pairs(const CorrectionJob& job, std::span<const BoundWeight> weights = {},
                           const ResidueFilter& filter = {});

i64 error_term_triples(const CorrectionJob& job, const MuTable& mu);

struct TripleThreshold {
    u64 n = 0;
    u64 kbar_n = 0;
    u64 s = 0;
};

/// Triple error for several thresholds sharing one delta and one bound T.
/// Nearby intervals are sieved together.
std::vector<i64> error_term_triples_multi(std::span<const TripleThreshold> thresholds, FixedDelta delta,
                                          u64 t, const MuTable& mu, std::size_t chunk = default_chunk,
                                          unsigned threads = 1);

}  // namespace pcount
