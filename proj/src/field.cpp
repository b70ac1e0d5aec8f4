#include "soq/field.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace soq {

namespace {

bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Minimal GF(p)[x] helpers on raw digit vectors, used before any field
// tables exist (modulus validation and canonical modulus search).
using RawPoly = std::vector<unsigned>;  // c[i] = coefficient of x^i, reduced mod p

void raw_trim(RawPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

RawPoly raw_mod(RawPoly a, const RawPoly& d, unsigned p) {
    raw_trim(a);
    const unsigned dd = static_cast<unsigned>(d.size()) - 1;  // d monic
    while (a.size() >= d.size() && !a.empty()) {
        unsigned lc = a.back();
        unsigned shift = static_cast<unsigned>(a.size()) - 1 - dd;
        for (unsigned i = 0; i <= dd; ++i)
            a[shift + i] = (a[shift + i] + p * lc - lc * d[i] % p) % p;
        raw_trim(a);
    }
    return a;
}

bool raw_is_irreducible(const RawPoly& f, unsigned p) {
    const unsigned deg = static_cast<unsigned>(f.size()) - 1;
    if (deg == 0) return false;
    if (deg == 1) return true;
    // Trial division by every monic polynomial of degree 1..deg/2.
    for (unsigned dd = 1; 2 * dd <= deg; ++dd) {
        std::uint64_t count = 1;
        for (unsigned i = 0; i < dd; ++i) count *= p;
        for (std::uint64_t code = 0; code < count; ++code) {
            RawPoly d(dd + 1, 0);
            std::uint64_t c = code;
            for (unsigned i = 0; i < dd; ++i) { d[i] = c % p; c /= p; }
            d[dd] = 1;
            if (raw_mod(f, d, p).empty()) return false;
        }
    }
    return true;
}

} // namespace

FiniteField::FiniteField(unsigned p, unsigned k, std::vector<unsigned> modulus) {
    if (!is_prime(p)) throw DomainError("field characteristic must be prime");
    if (k < 1) throw DomainError("extension degree must be >= 1");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) {
        q *= p;
        if (q > kMaxFieldSize) throw DomainError("field size exceeds 64 elements");
    }
    if (modulus.size() != k + 1) throw DomainError("modulus must have degree k");
    for (unsigned& c : modulus) c %= p;
    if (modulus.back() != 1) throw DomainError("modulus must be monic");
    if (k > 1 && !raw_is_irreducible(modulus, p))
        throw DomainError("modulus is not irreducible over GF(p)");

    auto d = std::make_shared<Data>();
    d->p = p;
    d->k = k;
    d->q = static_cast<unsigned>(q);
    d->modulus = modulus;

    const unsigned Q = d->q;
    auto digits_of = [&](unsigned a) {
        std::vector<unsigned> dg(k);
        for (unsigned i = 0; i < k; ++i) { dg[i] = a % p; a /= p; }
        return dg;
    };
    auto pack = [&](const std::vector<unsigned>& dg) {
        unsigned a = 0;
        for (unsigned i = k; i-- > 0;) a = a * p + dg[i] % p;
        return static_cast<Fe>(a);
    };

    d->add.resize(Q * Q);
    d->mul.resize(Q * Q);
    d->neg.resize(Q);
    d->inv.assign(Q, 0);
    for (unsigned a = 0; a < Q; ++a) {
        auto da = digits_of(a);
        std::vector<unsigned> dn(k);
        for (unsigned i = 0; i < k; ++i) dn[i] = (p - da[i]) % p;
        d->neg[a] = pack(dn);
        for (unsigned b = 0; b < Q; ++b) {
            auto db = digits_of(b);
            std::vector<unsigned> ds(k);
            for (unsigned i = 0; i < k; ++i) ds[i] = (da[i] + db[i]) % p;
            d->add[a * Q + b] = pack(ds);
            // polynomial product reduced by the modulus
            std::vector<unsigned> prod(2 * k - 1, 0);
            for (unsigned i = 0; i < k; ++i)
                for (unsigned j = 0; j < k; ++j)
                    prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            for (unsigned deg = 2 * k - 2; deg >= k && deg < prod.size(); --deg) {
                unsigned lc = prod[deg];
                if (lc) {
                    prod[deg] = 0;
                    for (unsigned i = 0; i < k; ++i)
                        prod[deg - k + i] =
                            (prod[deg - k + i] + p * lc - lc * modulus[i] % p) % p;
                }
            }
            prod.resize(k);
            d->mul[a * Q + b] = pack(prod);
        }
    }
    for (unsigned a = 1; a < Q; ++a)
        for (unsigned b = 1; b < Q; ++b)
            if (d->mul[a * Q + b] == 1) { d->inv[a] = static_cast<Fe>(b); break; }

    d->frob.resize(Q);
    for (unsigned a = 0; a < Q; ++a) {
        Fe r = 1;
        for (unsigned i = 0; i < p; ++i) r = d->mul[r * Q + a];
        d->frob[a] = r;
    }
    if (p == 2) {
        d->tr2.resize(Q);
        for (unsigned a = 0; a < Q; ++a) {
            Fe t = 0, x = static_cast<Fe>(a);
            for (unsigned i = 0; i < k; ++i) { t = d->add[t * Q + x]; x = d->frob[x]; }
            if (t > 1) throw InternalError("absolute trace left the prime field");
            d->tr2[a] = t;
        }
    }
    d_ = std::move(d);
}

FiniteField FiniteField::prime_field(unsigned p) {
    return FiniteField(p, 1, {0, 1});
}

FiniteField FiniteField::make(unsigned p, unsigned k) {
    if (k == 1) return prime_field(p);
    std::uint64_t count = 1;
    for (unsigned i = 0; i < k; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
        RawPoly m(k + 1, 0);
        std::uint64_t c = code;
        for (unsigned i = 0; i < k; ++i) { m[i] = c % p; c /= p; }
        m[k] = 1;
        if (raw_is_irreducible(m, p)) return FiniteField(p, k, m);
    }
    throw InternalError("no irreducible modulus found");
}

FiniteField FiniteField::of_order(unsigned q) {
    for (unsigned p = 2; p <= q; ++p) {
        if (!is_prime(p) || q % p) continue;
        unsigned k = 0, m = q;
        while (m % p == 0) { m /= p; ++k; }
        if (m != 1) break;
        return make(p, k);
    }
    throw DomainError("field order must be a prime power");
}

Fe FiniteField::inv(Fe a) const {
    if (a == 0) throw DomainError("inverse of zero");
    return d_->inv[a];
}

Fe FiniteField::pow(Fe a, std::uint64_t e) const {
    Fe r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Fe FiniteField::from_int(long v) const {
    long p = static_cast<long>(d_->p);
    long r = ((v % p) + p) % p;
    return static_cast<Fe>(r);
}

unsigned FiniteField::coeff(Fe a, unsigned i) const {
    unsigned v = a;
    for (unsigned j = 0; j < i; ++j) v /= d_->p;
    return v % d_->p;
}

Fe FiniteField::from_digits(const std::vector<unsigned>& digits) const {
    if (digits.size() > d_->k) throw DomainError("too many digits");
    unsigned a = 0;
    for (unsigned i = static_cast<unsigned>(digits.size()); i-- > 0;)
        a = a * d_->p + digits[i] % d_->p;
    return static_cast<Fe>(a);
}

unsigned FiniteField::trace2(Fe a) const {
    if (d_->p != 2) throw DomainError("absolute trace to GF(2) needs characteristic 2");
    return d_->tr2[a];
}

bool FiniteField::operator==(const FiniteField& o) const {
    return d_ == o.d_ ||
           (d_->p == o.d_->p && d_->k == o.d_->k && d_->modulus == o.d_->modulus);
}

std::string FiniteField::str(Fe a) const {
    return std::to_string(static_cast<unsigned>(a));
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(FiniteField f, std::vector<Fe> coeffs)
    : field_(std::move(f)), c_(std::move(coeffs)) {
    normalize();
}

void Poly::normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::x(const FiniteField& f) { return Poly(f, {0, 1}); }

Poly Poly::constant(const FiniteField& f, Fe c) { return Poly(f, {c}); }

Poly Poly::from_ints(const FiniteField& f, const std::vector<long>& c) {
    std::vector<Fe> v(c.size());
    for (size_t i = 0; i < c.size(); ++i) v[i] = f.from_int(c[i]);
    return Poly(f, std::move(v));
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Fe> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = field_.add(coeff(static_cast<unsigned>(i)),
                          o.coeff(static_cast<unsigned>(i)));
    return Poly(field_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
    std::vector<Fe> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = field_.sub(coeff(static_cast<unsigned>(i)),
                          o.coeff(static_cast<unsigned>(i)));
    return Poly(field_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly(field_);
    std::vector<Fe> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r[i + j] = field_.add(r[i + j], field_.mul(c_[i], o.c_[j]));
    }
    return Poly(field_, std::move(r));
}

Poly Poly::scaled(Fe s) const {
    std::vector<Fe> r(c_);
    for (Fe& v : r) v = field_.mul(v, s);
    return Poly(field_, std::move(r));
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
    if (d.is_zero()) throw DomainError("polynomial division by zero");
    std::vector<Fe> rem(c_);
    const int dd = d.degree();
    const Fe lcinv = field_.inv(d.leading());
    std::vector<Fe> quo;
    int rd = static_cast<int>(rem.size()) - 1;
    while (!rem.empty() && rd >= dd) {
        Fe f = field_.mul(rem.back(), lcinv);
        int shift = rd - dd;
        if (static_cast<int>(quo.size()) < shift + 1) quo.resize(shift + 1, 0);
        quo[shift] = f;
        for (int i = 0; i <= dd; ++i)
            rem[shift + i] = field_.sub(rem[shift + i],
                                        field_.mul(f, d.c_[i]));
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
        rd = static_cast<int>(rem.size()) - 1;
    }
    return {Poly(field_, std::move(quo)), Poly(field_, std::move(rem))};
}

Fe Poly::eval(Fe a) const {
    Fe r = 0;
    for (size_t i = c_.size(); i-- > 0;) r = field_.add(field_.mul(r, a), c_[i]);
    return r;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly(field_);
    std::vector<Fe> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) {
        Fe m = 0;
        for (size_t j = i % field_.p(); j-- > 0;) m = field_.add(m, field_.one());
        r[i - 1] = field_.mul(c_[i], m);
    }
    return Poly(field_, std::move(r));
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scaled(field_.inv(leading()));
}

Poly Poly::pow(unsigned e) const {
    Poly r = constant(field_, field_.one());
    Poly b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

Poly Poly::pow_mod(std::uint64_t e, const Poly& mod) const {
    Poly r = constant(field_, field_.one());
    Poly b = *this % mod;
    while (e) {
        if (e & 1) r = (r * b) % mod;
        b = (b * b) % mod;
        e >>= 1;
    }
    return r;
}

Poly Poly::reciprocal() const {
    if (is_zero() || c_[0] == 0)
        throw DomainError("reciprocal requires a nonzero constant term");
    std::vector<Fe> r(c_.rbegin(), c_.rend());
    Poly rev(field_, std::move(r));
    return rev.scaled(field_.inv(c_[0]));
}

bool Poly::operator<(const Poly& o) const {
    if (degree() != o.degree()) return degree() < o.degree();
    for (size_t i = c_.size(); i-- > 0;)
        if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
    return false;
}

std::string Poly::str() const {
    if (is_zero()) return "0";
    std::ostringstream s;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        if (!first) s << "+";
        first = false;
        if (i == 0 || c_[i] != 1) s << static_cast<unsigned>(c_[i]);
        if (i >= 1) {
            if (c_[i] != 1) s << "*";
            s << "x";
            if (i >= 2) s << "^" << i;
        }
    }
    return s.str();
}

Poly poly_gcd(const Poly& a, const Poly& b) {
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x % y;
        x = y;
        y = r;
    }
    return x.monic();
}

Poly poly_lcm(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly(a.field());
    return ((a * b) / poly_gcd(a, b)).monic();
}

// ---------------------------------------------------------------------------
// Factorization: squarefree decomposition, distinct-degree splitting,
// seeded equal-degree splitting.

namespace {

// p-th root of f, valid when f = g(x^p) (i.e. f' == 0): coefficientwise
// a -> a^{p^{k-1}} on every p-th coefficient.
Poly pth_root(const Poly& f) {
    const FiniteField& F = f.field();
    const unsigned p = F.p(), k = F.k();
    std::vector<Fe> r;
    for (int i = 0; i <= f.degree(); i += static_cast<int>(p)) {
        Fe a = f.coeff(static_cast<unsigned>(i));
        for (unsigned j = 0; j + 1 < k; ++j) a = F.frobenius(a);
        r.push_back(a);
    }
    return Poly(F, std::move(r));
}

void squarefree_decomp(const Poly& f, unsigned mult,
                       std::vector<std::pair<Poly, unsigned>>& out) {
    const FiniteField& F = f.field();
    if (f.degree() <= 0) return;
    Poly d = f.derivative();
    if (d.is_zero()) {
        squarefree_decomp(pth_root(f), mult * F.p(), out);
        return;
    }
    Poly c = poly_gcd(f, d);
    Poly w = (f / c).monic();
    unsigned i = 1;
    while (w.degree() > 0) {
        Poly y = poly_gcd(w, c);
        Poly z = (w / y).monic();
        if (z.degree() > 0) out.emplace_back(z, mult * i);
        w = y;
        c = (c / y).monic();
        ++i;
    }
    if (c.degree() > 0) squarefree_decomp(pth_root(c), mult * F.p(), out);
}

Poly random_poly_below(const FiniteField& F, int deg, std::mt19937_64& rng) {
    std::vector<Fe> c(static_cast<size_t>(deg));
    for (Fe& v : c) v = static_cast<Fe>(rng() % F.q());
    return Poly(F, std::move(c));
}

// Splits the squarefree g, a product of distinct irreducibles of degree d.
void equal_degree_split(const Poly& g, unsigned d, std::mt19937_64& rng,
                        std::vector<Poly>& out) {
    const FiniteField& F = g.field();
    if (g.degree() == static_cast<int>(d)) {
        out.push_back(g.monic());
        return;
    }
    const Poly one = Poly::constant(F, F.one());
    for (;;) {
        Poly h = random_poly_below(F, g.degree(), rng);
        if (h.degree() < 1) continue;
        Poly s(F);
        if (F.p() == 2) {
            // GF(2^k): trace map sum_{i<k*d} h^(2^i) mod g
            Poly t = h % g, acc(F);
            for (unsigned i = 0; i < F.k() * d; ++i) {
                acc = acc + t;
                t = (t * t) % g;
            }
            s = acc;
        } else {
            std::uint64_t e = 1;
            for (unsigned i = 0; i < d; ++i) e *= F.q();
            s = h.pow_mod((e - 1) / 2, g) - one;
        }
        Poly c = poly_gcd(s, g);
        if (c.degree() > 0 && c.degree() < g.degree()) {
            equal_degree_split(c, d, rng, out);
            equal_degree_split((g / c).monic(), d, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<std::pair<Poly, unsigned>> poly_factor(const Poly& f,
                                                   std::uint64_t seed) {
    if (f.is_zero()) throw DomainError("cannot factor the zero polynomial");
    const FiniteField& F = f.field();
    std::vector<std::pair<Poly, unsigned>> sqf;
    squarefree_decomp(f.monic(), 1, sqf);

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::pair<Poly, unsigned>> result;
    for (auto& [part, mult] : sqf) {
        // distinct-degree stage on the squarefree part
        Poly rest = part;
        Poly xp = Poly::x(F);
        Poly h = xp;  // x^{q^d} mod rest, updated as rest shrinks
        for (unsigned d = 1; rest.degree() > 0 &&
                             2 * d <= static_cast<unsigned>(rest.degree());
             ++d) {
            h = h.pow_mod(F.q(), rest);
            Poly g = poly_gcd(h - xp, rest);
            if (g.degree() > 0) {
                std::vector<Poly> irr;
                equal_degree_split(g, d, rng, irr);
                for (Poly& pi : irr) result.emplace_back(std::move(pi), mult);
                rest = (rest / g).monic();
                h = h % rest;
            }
        }
        if (rest.degree() > 0) result.emplace_back(rest, mult);
    }
    std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
        if (a.first < b.first) return true;
        if (b.first < a.first) return false;
        return a.second < b.second;
    });
    return result;
}

bool is_irreducible(const Poly& f, std::uint64_t seed) {
    if (f.degree() < 1) return false;
    auto fac = poly_factor(f, seed);
    return fac.size() == 1 && fac[0].second == 1;
}

Poly radical_part(const Poly& f, std::uint64_t seed) {
    auto fac = poly_factor(f, seed);
    Poly r = Poly::constant(f.field(), f.field().one());
    for (auto& [g, m] : fac) r = r * g;
    return r;
}

} // namespace soq
