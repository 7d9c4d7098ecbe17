#pragma once

// Prime-field arithmetic, number-theoretic transforms and CRT recombination.
//
// All residues handed across this interface are in normal form [0, p).
// Montgomery form is used internally by the transforms only.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pcount/types.hpp"

namespace pcount {

/// Odd modulus below 2^62 with 64-bit Montgomery reduction.
class Montgomery {
public:
    explicit Montgomery(u64 modulus);

    u64 modulus() const { return p_; }

    // a * b * 2^-64 mod p, inputs in [0, p)
    u64 mont_mul(u64 a, u64 b) const {
        const u128 t = static_cast<u128>(a) * b;
        const u64 m = static_cast<u64>(t) * p_neg_inv_;
        const u64 u = static_cast<u64>((t + static_cast<u128>(m) * p_) >> 64) - p_;
        return u + (p_ & (0 - (u >> 63)));
    }
    u64 to_mont(u64 a) const { return mont_mul(a, r2_); }
    u64 from_mont(u64 a) const { return mont_mul(a, 1); }

    u64 mul(u64 a, u64 b) const { return mont_mul(mont_mul(a, b), r2_); }
    // branch-free: p < 2^62, so a wrapped difference has its top bit set
    u64 add(u64 a, u64 b) const {
        const u64 s = a + b - p_;
        return s + (p_ & (0 - (s >> 63)));
    }
    u64 sub(u64 a, u64 b) const {
        const u64 d = a - b;
        return d + (p_ & (0 - (d >> 63)));
    }
    u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }

    u64 reduce(u64 x) const { return x % p_; }
    u64 reduce_signed(i64 x) const;
    u64 reduce_wide(i128 x) const;

    u64 pow(u64 base, u64 exp) const;
    /// Inverse of a nonzero residue; the modulus must be prime.
    u64 inv(u64 a) const;

    /// 1 in Montgomery form.
    u64 mont_one() const { return r1_; }

private:
    u64 p_;
    u64 p_neg_inv_;
    u64 r1_;
    u64 r2_;
};

bool is_prime_u64(u64 n);

/// Smallest primitive root of the prime p.
u64 primitive_root(u64 p);

/// Primes p < below, p = 1 (mod lcm(factor, 2^two_adicity)), largest first.
std::vector<u64> find_ntt_primes(u64 factor, unsigned two_adicity, std::size_t count,
                                 u64 below = u64{1} << 62);

/// Precomputed radix-2 transform of a fixed power-of-two length over one prime.
///
/// Forward evaluates sum_k a[k] * root^(j k) at j = 0..length-1 in natural order.
class NttContext {
public:
    NttContext(u64 modulus, std::size_t length);

    u64 modulus() const { return field_.modulus(); }
    std::size_t length() const { return length_; }
    u64 root() const { return root_; }
    u64 root_inv() const { return root_inv_; }
    u64 length_inv() const { return length_inv_; }
    const Montgomery& field() const { return field_; }

    void forward_inplace(std::span<u64> values) const;
    void inverse_inplace(std::span<u64> values) const;

private:
    void transform(std::span<u64> values, const std::vector<u64>& twiddles) const;

    Montgomery field_;
    std::size_t length_;
    unsigned log_length_;
    u64 root_;
    u64 root_inv_;
    u64 length_inv_;
    u64 length_inv_mont_;
    std::vector<u64> twiddles_;      // stage-major, Montgomery form
    std::vector<u64> twiddles_inv_;
};

std::size_t next_pow2(std::size_t n);

std::vector<u64> ntt_forward(std::span<const u64> values, const NttContext& ctx);
std::vector<u64> ntt_inverse(std::span<const u64> values, const NttContext& ctx);

/// Linear convolution; result has min(out_len, |a|+|b|-1) entries.
/// Requires |a| + |b| - 1 <= ctx.length().
std::vector<u64> convolve(std::span<const u64> a, std::span<const u64> b, const NttContext& ctx,
                          std::size_t out_len = static_cast<std::size_t>(-1));

/// Quadratic-time product mod p, truncated to out_len terms.
std::vector<u64> multiply_schoolbook(std::span<const u64> a, std::span<const u64> b,
                                     const Montgomery& field, std::size_t out_len);

/// Truncated product choosing schoolbook or NTT by size.
std::vector<u64> multiply(std::span<const u64> a, std::span<const u64> b, const Montgomery& field,
                          std::size_t out_len);

/// Process-wide shared context for (modulus, length); built on first use.
const NttContext& cached_context(u64 modulus, std::size_t length);

/// First n coefficients of exp(f(x)) over GF(p). Requires f[0] = 0 and p > n.
/// Newton iteration on the logarithm; products go through NTT once large enough.
std::vector<u64> power_series_exp(std::span<const u64> f, std::size_t n, const Montgomery& field);

/// First n coefficients of 1/g(x); g[0] must be invertible.
std::vector<u64> power_series_inverse(std::span<const u64> g, std::size_t n, const Montgomery& field);

/// First n coefficients of log(g(x)); g[0] must be 1.
std::vector<u64> power_series_log(std::span<const u64> g, std::size_t n, const Montgomery& field);

struct CrtPair {
    u64 residue1;
    u64 prime1;
    u64 residue2;
    u64 prime2;
};

/// The representative of the pair in (-P/2, P/2], P = prime1 * prime2.
i128 crt_combine(const CrtPair& pair);

/// Two NTT-friendly primes used side by side; their product bounds every lifted result.
struct ModulusPair {
    std::array<u64, 2> primes;

    u128 product() const { return static_cast<u128>(primes[0]) * primes[1]; }
    i128 lift(u64 r1, u64 r2) const { return crt_combine({r1, primes[0], r2, primes[1]}); }
};

enum class ModulusPool { primary, alternate };

/// Pair of distinct primes near 2^62 with p = 1 (mod lcm(factor, 2^32)).
/// The alternate pool yields a disjoint pair for cross-checks.
ModulusPair select_moduli(u64 factor, ModulusPool pool = ModulusPool::primary);

}  // namespace pcount
