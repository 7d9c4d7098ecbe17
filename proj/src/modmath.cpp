#include "pcount/modmath.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace pcount {

namespace {

u64 mulmod_plain(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod_plain(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) result = mulmod_plain(result, base, m);
        base = mulmod_plain(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Modular inverse by the extended Euclidean algorithm; gcd(a, m) must be 1.
u64 inverse_euclid(u64 a, u64 m) {
    i128 old_r = a % m, r = m;
    i128 old_s = 1, s = 0;
    while (r != 0) {
        const i128 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) throw std::invalid_argument("inverse: arguments are not coprime");
    i128 v = old_s % static_cast<i128>(m);
    if (v < 0) v += m;
    return static_cast<u64>(v);
}

u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mulmod_plain(x, x, n) + c) % n; };
        u64 x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
        if (n % p == 0) {
            out.push_back(p);
            factor_into(n / p, out);
            return;
        }
    }
    const u64 d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

std::vector<u64> distinct_prime_factors(u64 n) {
    std::vector<u64> f;
    for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
        if (n % p == 0) {
            f.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    factor_into(n, f);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

}  // namespace

Montgomery::Montgomery(u64 modulus) : p_(modulus) {
    if (modulus < 3 || modulus % 2 == 0 || modulus >= (u64{1} << 62))
        throw std::invalid_argument("Montgomery: modulus must be odd and in [3, 2^62)");
    u64 inv = modulus;  // inverse mod 2^64 by Newton lifting
    for (int i = 0; i < 6; ++i) inv *= 2 - modulus * inv;
    p_neg_inv_ = ~inv + 1;
    r1_ = static_cast<u64>((static_cast<u128>(1) << 64) % modulus);
    r2_ = static_cast<u64>(static_cast<u128>(r1_) * r1_ % modulus);
}

u64 Montgomery::reduce_signed(i64 x) const {
    const i64 r = x % static_cast<i64>(p_);
    return r < 0 ? static_cast<u64>(r + static_cast<i64>(p_)) : static_cast<u64>(r);
}

u64 Montgomery::reduce_wide(i128 x) const {
    const i128 r = x % static_cast<i128>(p_);
    return r < 0 ? static_cast<u64>(r + static_cast<i128>(p_)) : static_cast<u64>(r);
}

u64 Montgomery::pow(u64 base, u64 exp) const {
    u64 b = to_mont(base % p_);
    u64 result = r1_;
    while (exp != 0) {
        if (exp & 1) result = mont_mul(result, b);
        b = mont_mul(b, b);
        exp >>= 1;
    }
    return from_mont(result);
}

u64 Montgomery::inv(u64 a) const {
    if (a % p_ == 0) throw std::invalid_argument("Montgomery::inv: zero has no inverse");
    return pow(a, p_ - 2);
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod_plain(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod_plain(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 primitive_root(u64 p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("primitive_root: modulus is not prime");
    if (p == 2) return 1;
    const auto factors = distinct_prime_factors(p - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (u64 q : factors) {
            if (powmod_plain(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

std::vector<u64> find_ntt_primes(u64 factor, unsigned two_adicity, std::size_t count, u64 below) {
    if (factor == 0 || two_adicity > 61) throw std::invalid_argument("find_ntt_primes: bad parameters");
    const unsigned v2 = static_cast<unsigned>(std::countr_zero(factor));
    const u64 odd = factor >> v2;
    const unsigned a = std::max(v2, two_adicity);
    if (a >= 63 || odd > (below >> a)) throw std::invalid_argument("find_ntt_primes: step too large");
    const u64 step = odd << a;
    std::vector<u64> out;
    for (u64 j = (below - 2) / step; j >= 1 && out.size() < count; --j) {
        const u64 p = j * step + 1;
        if (is_prime_u64(p)) out.push_back(p);
    }
    if (out.size() < count) throw std::invalid_argument("find_ntt_primes: not enough primes");
    return out;
}

std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

NttContext::NttContext(u64 modulus, std::size_t length) : field_(modulus), length_(length) {
    if (length == 0 || !std::has_single_bit(length))
        throw std::invalid_argument("NttContext: length must be a power of two");
    if ((modulus - 1) % length != 0) throw std::invalid_argument("NttContext: modulus is not 1 mod length");
    log_length_ = static_cast<unsigned>(std::countr_zero(length));
    const u64 g = primitive_root(modulus);
    root_ = field_.pow(g, (modulus - 1) / length);
    root_inv_ = field_.inv(root_);
    length_inv_ = field_.inv(length % modulus);
    length_inv_mont_ = field_.to_mont(length_inv_);

    auto build = [&](u64 w) {
        std::vector<u64> tw(std::max<std::size_t>(length, 2));
        for (std::size_t h = 1; h < length; h <<= 1) {
            const u64 step = field_.to_mont(field_.pow(w, length / (2 * h)));
            u64 cur = field_.mont_one();
            for (std::size_t j = 0; j < h; ++j) {
                tw[h + j] = cur;
                cur = field_.mont_mul(cur, step);
            }
        }
        return tw;
    };
    twiddles_ = build(root_);
    twiddles_inv_ = build(root_inv_);
}

void NttContext::transform(std::span<u64> a, const std::vector<u64>& tw) const {
    const std::size_t n = length_;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t h = 1; h < n; h <<= 1) {
        const u64* w = tw.data() + h;
        for (std::size_t i = 0; i < n; i += 2 * h) {
            u64* lo = a.data() + i;
            u64* hi = lo + h;
            for (std::size_t j = 0; j < h; ++j) {
                const u64 u = lo[j];
                const u64 v = field_.mont_mul(hi[j], w[j]);
                lo[j] = field_.add(u, v);
                hi[j] = field_.sub(u, v);
            }
        }
    }
}

void NttContext::forward_inplace(std::span<u64> values) const {
    if (values.size() != length_) throw std::invalid_argument("ntt: length mismatch");
    transform(values, twiddles_);
}

void NttContext::inverse_inplace(std::span<u64> values) const {
    if (values.size() != length_) throw std::invalid_argument("ntt: length mismatch");
    transform(values, twiddles_inv_);
    for (auto& v : values) v = field_.mont_mul(v, length_inv_mont_);
}

std::vector<u64> ntt_forward(std::span<const u64> values, const NttContext& ctx) {
    std::vector<u64> out(values.begin(), values.end());
    ctx.forward_inplace(out);
    return out;
}

std::vector<u64> ntt_inverse(std::span<const u64> values, const NttContext& ctx) {
    std::vector<u64> out(values.begin(), values.end());
    ctx.inverse_inplace(out);
    return out;
}

std::vector<u64> convolve(std::span<const u64> a, std::span<const u64> b, const NttContext& ctx,
                          std::size_t out_len) {
    if (a.empty() || b.empty()) return {};
    const std::size_t full = a.size() + b.size() - 1;
    if (full > ctx.length()) throw std::invalid_argument("convolve: transform too short for linear product");
    const Montgomery& f = ctx.field();
    std::vector<u64> fa(ctx.length(), 0), fb(ctx.length(), 0);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    ctx.forward_inplace(fa);
    ctx.forward_inplace(fb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = f.mul(fa[i], fb[i]);
    ctx.inverse_inplace(fa);
    fa.resize(std::min(out_len, full));
    return fa;
}

const NttContext& cached_context(u64 modulus, std::size_t length) {
    static std::mutex mu;
    static std::map<std::pair<u64, std::size_t>, std::unique_ptr<NttContext>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{modulus, length}];
    if (!slot) slot = std::make_unique<NttContext>(modulus, length);
    return *slot;
}

std::vector<u64> multiply_schoolbook(std::span<const u64> a, std::span<const u64> b,
                                     const Montgomery& field, std::size_t out_len) {
    if (a.empty() || b.empty()) return {};
    const std::size_t n = std::min(out_len, a.size() + b.size() - 1);
    std::vector<u64> out(n, 0);
    for (std::size_t i = 0; i < a.size() && i < n; ++i) {
        if (a[i] == 0) continue;
        const std::size_t lim = std::min(b.size(), n - i);
        for (std::size_t j = 0; j < lim; ++j) out[i + j] = field.add(out[i + j], field.mont_mul(a[i], b[j]));
    }
    for (auto& v : out) v = field.to_mont(v);
    return out;
}

std::vector<u64> multiply(std::span<const u64> a, std::span<const u64> b, const Montgomery& field,
                          std::size_t out_len) {
    a = a.subspan(0, std::min(a.size(), out_len));
    b = b.subspan(0, std::min(b.size(), out_len));
    if (a.empty() || b.empty()) return {};
    if (std::min(a.size(), b.size()) <= 48) return multiply_schoolbook(a, b, field, out_len);
    const std::size_t full = a.size() + b.size() - 1;
    const std::size_t len = next_pow2(full);
    if ((field.modulus() - 1) % len != 0) return multiply_schoolbook(a, b, field, out_len);
    return convolve(a, b, cached_context(field.modulus(), len), out_len);
}

namespace {

std::vector<u64> inverses_upto(std::size_t n, const Montgomery& field) {
    std::vector<u64> inv(n + 1, 0);
    if (n >= 1) inv[1] = 1;
    const u64 p = field.modulus();
    for (std::size_t i = 2; i <= n; ++i) inv[i] = field.neg(field.mul(p / i, inv[p % i]));
    return inv;
}

}  // namespace

std::vector<u64> power_series_inverse(std::span<const u64> g, std::size_t n, const Montgomery& field) {
    if (n == 0) return {};
    if (g.empty() || g[0] % field.modulus() == 0)
        throw std::invalid_argument("power_series_inverse: constant term not invertible");
    std::vector<u64> h{field.inv(g[0])};
    std::size_t len = 1;
    while (len < n) {
        const std::size_t len2 = std::min(2 * len, n);
        auto gh = multiply(g.subspan(0, std::min(g.size(), len2)), h, field, len2);
        gh.resize(len2, 0);
        for (auto& v : gh) v = field.neg(v);
        gh[0] = field.add(gh[0], 2);
        h = multiply(h, gh, field, len2);
        h.resize(len2, 0);
        len = len2;
    }
    return h;
}

std::vector<u64> power_series_log(std::span<const u64> g, std::size_t n, const Montgomery& field) {
    if (n == 0) return {};
    if (g.empty() || g[0] != 1) throw std::invalid_argument("power_series_log: constant term must be 1");
    if (n >= field.modulus()) throw std::invalid_argument("power_series_log: modulus too small");
    std::vector<u64> deriv(n - 1 == 0 ? 1 : n - 1, 0);
    for (std::size_t i = 1; i < std::min(g.size(), n); ++i) deriv[i - 1] = field.mul(g[i], i);
    auto q = multiply(deriv, power_series_inverse(g, n, field), field, n - 1);
    q.resize(n - 1 == 0 ? 0 : n - 1, 0);
    const auto inv = inverses_upto(n, field);
    std::vector<u64> out(n, 0);
    for (std::size_t i = 1; i < n; ++i) out[i] = field.mul(q[i - 1], inv[i]);
    return out;
}

std::vector<u64> power_series_exp(std::span<const u64> f, std::size_t n, const Montgomery& field) {
    if (!f.empty() && f[0] % field.modulus() != 0)
        throw std::invalid_argument("power_series_exp: constant term must be zero");
    if (n == 0) return {};
    if (n >= field.modulus()) throw std::invalid_argument("power_series_exp: modulus too small");
    std::vector<u64> c{1};
    std::size_t len = 1;
    while (len < n) {
        const std::size_t len2 = std::min(2 * len, n);
        auto t = power_series_log(c, len2, field);
        for (std::size_t i = 0; i < len2; ++i) {
            const u64 fi = i < f.size() ? f[i] % field.modulus() : 0;
            t[i] = field.sub(fi, t[i]);
        }
        t[0] = field.add(t[0], 1);
        c = multiply(c, t, field, len2);
        c.resize(len2, 0);
        len = len2;
    }
    return c;
}

i128 crt_combine(const CrtPair& pair) {
    const u64 p1 = pair.prime1, p2 = pair.prime2;
    if (p1 == p2 || std::gcd(p1, p2) != 1) throw std::invalid_argument("crt_combine: moduli not coprime");
    const u64 r1 = pair.residue1 % p1, r2 = pair.residue2 % p2;
    const u64 inv = inverse_euclid(p1 % p2, p2);
    const u64 diff = (r2 + p2 - r1 % p2) % p2;
    const u64 t = mulmod_plain(diff, inv, p2);
    const u128 big = static_cast<u128>(p1) * p2;
    const u128 x = static_cast<u128>(t) * p1 + r1;
    return x > big / 2 ? static_cast<i128>(x) - static_cast<i128>(big) : static_cast<i128>(x);
}

ModulusPair select_moduli(u64 factor, ModulusPool pool) {
    static std::mutex mu;
    static std::map<u64, std::vector<u64>> cache;
    std::vector<u64> primes;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[factor];
        if (slot.empty()) slot = find_ntt_primes(factor, 32, 4);
        primes = slot;
    }
    const std::size_t off = pool == ModulusPool::primary ? 0 : 2;
    return ModulusPair{{primes[off], primes[off + 1]}};
}

}  // namespace pcount
