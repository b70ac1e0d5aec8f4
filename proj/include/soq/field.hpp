#pragma once

/**
 * @file field.hpp
 * @brief Exact arithmetic in GF(p^k), p^k <= 64, and in its univariate
 *        polynomial ring, including factorization into irreducibles.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "soq/errors.hpp"

namespace soq {

/// Field element, stored as its canonical index: the base-p digit vector
/// (c_0, ..., c_{k-1}) w.r.t. the power basis of the modulus root packs to
/// c_0 + c_1*p + ... + c_{k-1}*p^{k-1}. The index is a total order used for
/// deterministic tie-breaking library-wide.
using Fe = std::uint8_t;

inline constexpr unsigned kMaxFieldSize = 64;

/// GF(p^k) with an explicit monic irreducible modulus polynomial over GF(p).
/// All arithmetic is exact and table-driven. Instances are immutable after
/// construction and cheap to copy (shared tables), so they are safe for
/// concurrent read-only use.
class FiniteField {
public:
    /// Builds GF(p^k) from modulus coefficients c_0..c_k (monic, irreducible
    /// over GF(p)). Throws DomainError on any invalid parameter.
    FiniteField(unsigned p, unsigned k, std::vector<unsigned> modulus);

    /// GF(p) with the convention modulus = x.
    static FiniteField prime_field(unsigned p);

    /// GF(p^k) with the canonical modulus: the monic irreducible of degree k
    /// whose digit-packed value is smallest.
    static FiniteField make(unsigned p, unsigned k);

    /// Parses a prime power q = p^k. DomainError if q is not one.
    static FiniteField of_order(unsigned q);

    unsigned p() const { return d_->p; }
    unsigned k() const { return d_->k; }
    unsigned q() const { return d_->q; }
    const std::vector<unsigned>& modulus() const { return d_->modulus; }

    Fe zero() const { return 0; }
    Fe one() const { return 1; }

    Fe add(Fe a, Fe b) const { return d_->add[a * d_->q + b]; }
    Fe sub(Fe a, Fe b) const { return d_->add[a * d_->q + d_->neg[b]]; }
    Fe neg(Fe a) const { return d_->neg[a]; }
    Fe mul(Fe a, Fe b) const { return d_->mul[a * d_->q + b]; }
    Fe inv(Fe a) const;
    Fe div(Fe a, Fe b) const { return mul(a, inv(b)); }
    Fe pow(Fe a, std::uint64_t e) const;
    Fe frobenius(Fe a) const { return d_->frob[a]; }

    /// Reduces an integer into the prime subfield.
    Fe from_int(long v) const;

    /// i-th base-p digit of the element (coordinate w.r.t. the power basis).
    unsigned coeff(Fe a, unsigned i) const;

    /// Element with the given power-basis digits.
    Fe from_digits(const std::vector<unsigned>& digits) const;

    /// Absolute trace to GF(2) as 0/1. Requires p == 2.
    unsigned trace2(Fe a) const;

    bool operator==(const FiniteField& o) const;
    bool operator!=(const FiniteField& o) const { return !(*this == o); }

    std::string str(Fe a) const;

private:
    struct Data {
        unsigned p = 0, k = 0, q = 0;
        std::vector<unsigned> modulus;
        std::vector<Fe> add, mul;  // q*q tables
        std::vector<Fe> neg, inv;  // per element; inv[0] unused
        std::vector<Fe> frob;      // a -> a^p
        std::vector<std::uint8_t> tr2;
    };
    std::shared_ptr<const Data> d_;
};

/// Dense univariate polynomial over a FiniteField, canonical trailing-zero-
/// free form; degree() == -1 for the zero polynomial.
class Poly {
public:
    explicit Poly(FiniteField f) : field_(std::move(f)) {}
    Poly(FiniteField f, std::vector<Fe> coeffs);

    static Poly x(const FiniteField& f);
    static Poly constant(const FiniteField& f, Fe c);
    /// Convenience: coefficients as integers, c[i] the coefficient of x^i.
    static Poly from_ints(const FiniteField& f, const std::vector<long>& c);

    const FiniteField& field() const { return field_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    Fe coeff(unsigned i) const { return i < c_.size() ? c_[i] : Fe{0}; }
    Fe leading() const { return c_.empty() ? Fe{0} : c_.back(); }
    const std::vector<Fe>& coeffs() const { return c_; }
    bool is_monic() const { return !c_.empty() && c_.back() == field_.one(); }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(Fe s) const;
    /// Quotient and remainder; DomainError on division by zero.
    std::pair<Poly, Poly> divmod(const Poly& d) const;
    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }

    Fe eval(Fe a) const;
    Poly derivative() const;
    Poly monic() const;
    Poly pow(unsigned e) const;
    Poly pow_mod(std::uint64_t e, const Poly& mod) const;

    /// f*(x) = f(0)^{-1} x^{deg f} f(1/x). DomainError if f(0) == 0.
    Poly reciprocal() const;

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
    /// Canonical order: by degree, then digits from the top coefficient down.
    bool operator<(const Poly& o) const;

    std::string str() const;

private:
    FiniteField field_;
    std::vector<Fe> c_;
    void normalize();
};

Poly poly_gcd(const Poly& a, const Poly& b);  // monic gcd
Poly poly_lcm(const Poly& a, const Poly& b);

/// Factorization into monic irreducibles with multiplicities, sorted in
/// canonical polynomial order. Squarefree decomposition, then distinct-degree
/// splitting, then seeded equal-degree splitting; deterministic for a fixed
/// seed. DomainError on the zero polynomial.
std::vector<std::pair<Poly, unsigned>> poly_factor(const Poly& f,
                                                   std::uint64_t seed = 0);

bool is_irreducible(const Poly& f, std::uint64_t seed = 0);

/// Product of the distinct monic irreducible factors.
Poly radical_part(const Poly& f, std::uint64_t seed = 0);

} // namespace soq
