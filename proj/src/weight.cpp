#include "pcount/weight.hpp"

#include <numeric>
#include <stdexcept>

namespace pcount {

namespace {

std::vector<std::pair<u64, unsigned>> factor_small(u64 m) {
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 q = 2; q * q <= m; ++q) {
        if (m % q != 0) continue;
        unsigned a = 0;
        while (m % q == 0) {
            m /= q;
            ++a;
        }
        out.emplace_back(q, a);
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

u64 powmod_small(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = static_cast<u64>(static_cast<u128>(r) * b % m);
        b = static_cast<u64>(static_cast<u128>(b) * b % m);
        e >>= 1;
    }
    return r;
}

}  // namespace

u64 euler_phi(u64 m) {
    u64 phi = m;
    for (auto [q, a] : factor_small(m)) phi = phi / q * (q - 1);
    return phi;
}

CharacterGroup::CharacterGroup(u64 modulus) : m_(modulus), phi_(1), e_(1) {
    if (modulus == 0) throw std::invalid_argument("character modulus must be positive");
    if (modulus > (u64{1} << 20)) throw std::invalid_argument("character modulus too large");

    // Each cyclic factor: component modulus, discrete-log table over that modulus.
    struct Cyclic {
        u64 comp_mod;
        u64 order;
        std::vector<long long> log;  // by residue mod comp_mod
    };
    std::vector<Cyclic> cyc;
    for (auto [q, a] : factor_small(modulus)) {
        u64 qa = 1;
        for (unsigned i = 0; i < a; ++i) qa *= q;
        if (q == 2) {
            if (a == 1) continue;
            if (a == 2) {
                Cyclic c{4, 2, std::vector<long long>(4, -1)};
                c.log[1] = 0;
                c.log[3] = 1;
                cyc.push_back(std::move(c));
                continue;
            }
            // (Z/2^a)^* = <-1> x <5>
            Cyclic sign{qa, 2, std::vector<long long>(qa, -1)};
            Cyclic five{qa, qa / 4, std::vector<long long>(qa, -1)};
            u64 x = 1;
            for (u64 t = 0; t < qa / 4; ++t) {
                sign.log[x] = 0;
                five.log[x] = static_cast<long long>(t);
                sign.log[qa - x] = 1;
                five.log[qa - x] = static_cast<long long>(t);
                x = x * 5 % qa;
            }
            cyc.push_back(std::move(sign));
            cyc.push_back(std::move(five));
            continue;
        }
        const u64 order = qa / q * (q - 1);
        u64 g = 2;
        for (;; ++g) {
            bool prim = true;
            for (auto [r, b] : factor_small(q - 1)) {
                (void)b;
                if (powmod_small(g, (q - 1) / r, q) == 1) {
                    prim = false;
                    break;
                }
            }
            if (prim) break;
        }
        if (a >= 2 && powmod_small(g, q - 1, q * q) == 1) g += q;
        Cyclic c{qa, order, std::vector<long long>(qa, -1)};
        u64 x = 1;
        for (u64 t = 0; t < order; ++t) {
            c.log[x] = static_cast<long long>(t);
            x = static_cast<u64>(static_cast<u128>(x) * g % qa);
        }
        cyc.push_back(std::move(c));
    }

    for (const auto& c : cyc) {
        factors_.push_back({c.order});
        phi_ *= c.order;
        e_ = std::lcm(e_, c.order);
    }
    logs_.assign(m_, {});
    unit_.assign(m_, 0);
    for (u64 n = 0; n < m_; ++n) {
        if (std::gcd(n, m_) != 1) continue;
        unit_[n] = 1;
        std::vector<long long> l;
        l.reserve(cyc.size());
        for (const auto& c : cyc) l.push_back(c.log[n % c.comp_mod]);
        logs_[n] = std::move(l);
    }
}

long long CharacterGroup::log_value(u64 j, u64 n) const {
    if (!unit_[n % m_]) return -1;
    const auto& l = logs_[n % m_];
    u64 total = 0;
    u64 rest = j;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const u64 o = factors_[i].order;
        const u64 t = rest % o;
        rest /= o;
        total = (total + static_cast<u64>(static_cast<u128>(t) * static_cast<u64>(l[i]) % o) * (e_ / o)) % e_;
    }
    return static_cast<long long>(total);
}

u64 CharacterGroup::conjugate(u64 j) const {
    u64 out = 0, mult = 1, rest = j;
    for (const auto& f : factors_) {
        const u64 t = rest % f.order;
        rest /= f.order;
        out += ((f.order - t) % f.order) * mult;
        mult *= f.order;
    }
    return out;
}

MultiplicativeWeight MultiplicativeWeight::unit() { return {}; }

MultiplicativeWeight MultiplicativeWeight::power(unsigned ell) {
    MultiplicativeWeight w;
    w.kind_ = ell == 0 ? Kind::unit : Kind::power;
    w.ell_ = ell;
    return w;
}

MultiplicativeWeight MultiplicativeWeight::character(std::shared_ptr<const CharacterGroup> group, u64 index) {
    if (!group || index >= group->count()) throw std::invalid_argument("character index out of range");
    MultiplicativeWeight w;
    w.kind_ = Kind::character;
    w.group_ = std::move(group);
    w.index_ = index;
    return w;
}

u64 MultiplicativeWeight::power_period() const {
    switch (kind_) {
        case Kind::unit: return 1;
        case Kind::power: return 0;
        case Kind::character: return group_->exponent();
    }
    return 0;
}

BoundWeight::BoundWeight(const MultiplicativeWeight& weight, const Montgomery& field)
    : weight_(weight), field_(field) {
    const u64 p = field_.modulus();
    if (weight.kind() == MultiplicativeWeight::Kind::power) {
        const u64 d = weight.power_exponent() + 1;
        if (d + 1 >= p) throw std::invalid_argument("power weight exponent too large for modulus");
        sample_prefix_.assign(d + 1, 0);
        for (u64 i = 1; i <= d; ++i)
            sample_prefix_[i] = field_.add(sample_prefix_[i - 1], field_.pow(i, weight.power_exponent()));
        inv_fact_.assign(d + 1, 1);
        u64 f = 1;
        for (u64 i = 1; i <= d; ++i) f = field_.mul(f, i);
        inv_fact_[d] = field_.inv(f);
        for (u64 i = d; i >= 1; --i) inv_fact_[i - 1] = field_.mul(inv_fact_[i], i);
    } else if (weight.kind() == MultiplicativeWeight::Kind::character) {
        const CharacterGroup& g = *weight.group();
        const u64 e = g.exponent();
        if ((p - 1) % e != 0) throw unsupported_modulus("field lacks roots of unity for this character group");
        const u64 zeta = field_.pow(primitive_root(p), (p - 1) / e);
        zeta_pow_.resize(e);
        u64 z = 1;
        for (u64 k = 0; k < e; ++k) {
            zeta_pow_[k] = z;
            z = field_.mul(z, zeta);
        }
        const u64 m = g.modulus();
        period_values_.assign(m, 0);
        period_prefix_.assign(m + 1, 0);
        for (u64 r = 0; r < m; ++r) {
            const long long lv = g.log_value(weight.character_index(), r);
            period_values_[r] = lv < 0 ? 0 : zeta_pow_[static_cast<u64>(lv)];
        }
        for (u64 i = 1; i <= m; ++i) period_prefix_[i] = field_.add(period_prefix_[i - 1], period_values_[i % m]);
    }
}

u64 BoundWeight::at(u64 n) const {
    switch (weight_.kind()) {
        case MultiplicativeWeight::Kind::unit: return 1;
        case MultiplicativeWeight::Kind::power: return field_.pow(n % field_.modulus(), weight_.power_exponent());
        case MultiplicativeWeight::Kind::character: return period_values_[n % period_values_.size()];
    }
    return 0;
}

u64 BoundWeight::prefix(u64 x) const {
    const u64 p = field_.modulus();
    switch (weight_.kind()) {
        case MultiplicativeWeight::Kind::unit: return x % p;
        case MultiplicativeWeight::Kind::character: {
            const u64 m = period_values_.size();
            return field_.add(field_.mul((x / m) % p, period_prefix_[m]), period_prefix_[x % m]);
        }
        case MultiplicativeWeight::Kind::power: break;
    }
    // Lagrange interpolation of the degree-d polynomial through 0..d.
    const u64 d = sample_prefix_.size() - 1;
    const u64 xr = x % p;
    if (xr <= d) return sample_prefix_[xr];
    std::vector<u64> pre(d + 2, 1), suf(d + 2, 1);
    for (u64 i = 0; i <= d; ++i) pre[i + 1] = field_.mul(pre[i], field_.sub(xr, i));
    for (u64 i = d + 1; i-- > 0;) suf[i] = field_.mul(suf[i + 1], field_.sub(xr, i));
    u64 total = 0;
    for (u64 i = 0; i <= d; ++i) {
        u64 term = field_.mul(field_.mul(pre[i], suf[i + 1]), field_.mul(inv_fact_[i], inv_fact_[d - i]));
        term = field_.mul(term, sample_prefix_[i]);
        total = ((d - i) & 1) ? field_.sub(total, term) : field_.add(total, term);
    }
    return total;
}

u64 BoundWeight::at_prime_power(u64 p, u64 r) const {
    switch (weight_.kind()) {
        case MultiplicativeWeight::Kind::unit: return 1;
        case MultiplicativeWeight::Kind::power:
            return field_.pow(field_.pow(p % field_.modulus(), weight_.power_exponent()), r);
        case MultiplicativeWeight::Kind::character: {
            const long long lv = weight_.group()->log_value(weight_.character_index(), p);
            if (lv < 0) return 0;
            const u64 e = zeta_pow_.size();
            return zeta_pow_[static_cast<u64>(static_cast<u128>(lv) * r % e)];
        }
    }
    return 0;
}

}  // namespace pcount
