#pragma once

// Completely multiplicative weights h with prefix sums, evaluated in a prime field.
//
// Three families: the constant 1, powers h(n) = n^l, and Dirichlet characters
// modulo m. Character values are roots of unity of order dividing the group
// exponent e; they are stored as exponents so one table serves every field.

#include <memory>
#include <vector>

#include "pcount/modmath.hpp"
#include "pcount/types.hpp"

namespace pcount {

/// Character group of (Z/mZ)^* as a product of cyclic factors.
class CharacterGroup {
public:
    explicit CharacterGroup(u64 modulus);

    u64 modulus() const { return m_; }
    u64 phi() const { return phi_; }
    /// Exponent of the group: every character value is an e-th root of unity.
    u64 exponent() const { return e_; }
    u64 count() const { return phi_; }

    /// chi_j(n) = zeta_e^result, or -1 when gcd(n, m) > 1.
    long long log_value(u64 j, u64 n) const;
    /// Index of the conjugate character.
    u64 conjugate(u64 j) const;

private:
    struct Factor {
        u64 order;
    };
    u64 m_;
    u64 phi_;
    u64 e_;
    std::vector<Factor> factors_;
    // per residue class: discrete log in each cyclic factor, -1 for non-units
    std::vector<std::vector<long long>> logs_;
    std::vector<char> unit_;
};

class MultiplicativeWeight {
public:
    enum class Kind { unit, power, character };

    static MultiplicativeWeight unit();
    static MultiplicativeWeight power(unsigned ell);
    static MultiplicativeWeight character(std::shared_ptr<const CharacterGroup> group, u64 index);

    Kind kind() const { return kind_; }
    unsigned power_exponent() const { return ell_; }
    const CharacterGroup* group() const { return group_.get(); }
    u64 character_index() const { return index_; }

    /// Period o of r -> h(p)^r for units p (h(p)^o = 1), or 0 when there is none.
    u64 power_period() const;

private:
    Kind kind_ = Kind::unit;
    unsigned ell_ = 0;
    std::shared_ptr<const CharacterGroup> group_;
    u64 index_ = 0;
};

/// A weight bound to one prime field, with O(1) point values and prefix sums.
class BoundWeight {
public:
    BoundWeight(const MultiplicativeWeight& weight, const Montgomery& field);

    const Montgomery& field() const { return field_; }
    const MultiplicativeWeight& weight() const { return weight_; }

    u64 at(u64 n) const;
    /// Sum of h(n) over 1 <= n <= x.
    u64 prefix(u64 x) const;
    /// h(p)^r for a prime p.
    u64 at_prime_power(u64 p, u64 r) const;

private:
    MultiplicativeWeight weight_;
    Montgomery field_;
    // power weights: Lagrange interpolation data for sum n^l
    std::vector<u64> sample_prefix_;
    std::vector<u64> inv_fact_;
    // characters: zeta powers and one period of values / prefix sums
    std::vector<u64> zeta_pow_;
    std::vector<u64> period_values_;
    std::vector<u64> period_prefix_;
};

/// Euler's phi for small arguments.
u64 euler_phi(u64 m);

}  // namespace pcount
