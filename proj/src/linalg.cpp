#include "soq/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace soq {

bool vec_is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](Fe x) { return x == 0; });
}

Vec vec_add(const FiniteField& F, const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = F.add(a[i], b[i]);
    return r;
}

Vec vec_sub(const FiniteField& F, const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = F.sub(a[i], b[i]);
    return r;
}

Vec vec_scaled(const FiniteField& F, const Vec& a, Fe s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], s);
    return r;
}

std::uint64_t vec_index(const FiniteField& F, const Vec& v) {
    std::uint64_t idx = 0;
    for (size_t i = v.size(); i-- > 0;) idx = idx * F.q() + v[i];
    return idx;
}

Vec vec_from_index(const FiniteField& F, unsigned n, std::uint64_t idx) {
    Vec v(n);
    for (unsigned i = 0; i < n; ++i) {
        v[i] = static_cast<Fe>(idx % F.q());
        idx /= F.q();
    }
    return v;
}

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(FiniteField f, unsigned rows, unsigned cols)
    : rows_(rows), cols_(cols), F_(std::move(f)), a_(rows * cols, 0) {}

Mat Mat::identity(const FiniteField& f, unsigned n) {
    Mat m(f, n, n);
    for (unsigned i = 0; i < n; ++i) m.set(i, i, f.one());
    return m;
}

Mat Mat::from_rows(const FiniteField& f, const std::vector<Vec>& rows) {
    if (rows.empty()) throw DomainError("from_rows needs at least one row");
    Mat m(f, static_cast<unsigned>(rows.size()),
          static_cast<unsigned>(rows[0].size()));
    for (unsigned i = 0; i < m.rows_; ++i) {
        if (rows[i].size() != m.cols_) throw DomainError("ragged rows");
        for (unsigned j = 0; j < m.cols_; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

Mat Mat::companion(const Poly& f) {
    if (!f.is_monic() || f.degree() < 1)
        throw DomainError("companion matrix needs a monic nonconstant polynomial");
    const FiniteField& F = f.field();
    const unsigned n = static_cast<unsigned>(f.degree());
    Mat m(F, n, n);
    for (unsigned i = 0; i + 1 < n; ++i) m.set(i, i + 1, F.one());
    for (unsigned j = 0; j < n; ++j) m.set(n - 1, j, F.neg(f.coeff(j)));
    return m;
}

Vec Mat::row(unsigned i) const {
    return Vec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
}

Mat Mat::operator+(const Mat& o) const {
    Mat r(F_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = F_.add(a_[i], o.a_[i]);
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    Mat r(F_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = F_.sub(a_[i], o.a_[i]);
    return r;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw DomainError("matrix size mismatch");
    Mat r(F_, rows_, o.cols_);
    for (unsigned i = 0; i < rows_; ++i)
        for (unsigned k = 0; k < cols_; ++k) {
            Fe aik = at(i, k);
            if (aik == 0) continue;
            for (unsigned j = 0; j < o.cols_; ++j)
                r.set(i, j, F_.add(r.at(i, j), F_.mul(aik, o.at(k, j))));
        }
    return r;
}

Mat Mat::scaled(Fe s) const {
    Mat r(F_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = F_.mul(a_[i], s);
    return r;
}

Mat Mat::transpose() const {
    Mat r(F_, cols_, rows_);
    for (unsigned i = 0; i < rows_; ++i)
        for (unsigned j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
}

Mat Mat::pow(std::uint64_t e) const {
    Mat r = identity(F_, rows_), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

Vec Mat::apply(const Vec& v) const {
    if (v.size() != rows_) throw DomainError("vector length mismatch");
    Vec r(cols_, 0);
    for (unsigned i = 0; i < rows_; ++i) {
        if (v[i] == 0) continue;
        for (unsigned j = 0; j < cols_; ++j)
            r[j] = F_.add(r[j], F_.mul(v[i], at(i, j)));
    }
    return r;
}

std::vector<unsigned> rref_in_place(Mat& m) {
    const FiniteField& F = m.field();
    std::vector<unsigned> pivots;
    unsigned r = 0;
    for (unsigned c = 0; c < m.cols() && r < m.rows(); ++c) {
        unsigned pr = r;
        while (pr < m.rows() && m.at(pr, c) == 0) ++pr;
        if (pr == m.rows()) continue;
        if (pr != r)
            for (unsigned j = 0; j < m.cols(); ++j) {
                Fe t = m.at(r, j);
                m.set(r, j, m.at(pr, j));
                m.set(pr, j, t);
            }
        Fe inv = F.inv(m.at(r, c));
        for (unsigned j = 0; j < m.cols(); ++j) m.set(r, j, F.mul(m.at(r, j), inv));
        for (unsigned i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            Fe f = m.at(i, c);
            for (unsigned j = 0; j < m.cols(); ++j)
                m.set(i, j, F.sub(m.at(i, j), F.mul(f, m.at(r, j))));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::optional<Mat> Mat::inverse() const {
    if (rows_ != cols_) throw DomainError("inverse of a non-square matrix");
    Mat aug(F_, rows_, 2 * cols_);
    for (unsigned i = 0; i < rows_; ++i) {
        for (unsigned j = 0; j < cols_; ++j) aug.set(i, j, at(i, j));
        aug.set(i, cols_ + i, F_.one());
    }
    auto piv = rref_in_place(aug);
    if (piv.size() != rows_ || (rows_ > 0 && piv.back() >= cols_))
        return std::nullopt;
    Mat inv(F_, rows_, cols_);
    for (unsigned i = 0; i < rows_; ++i)
        for (unsigned j = 0; j < cols_; ++j) inv.set(i, j, aug.at(i, cols_ + j));
    return inv;
}

unsigned Mat::rank() const {
    Mat c = *this;
    return static_cast<unsigned>(rref_in_place(c).size());
}

bool Mat::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](Fe x) { return x == 0; });
}

bool Mat::is_identity() const {
    if (rows_ != cols_) return false;
    return *this == identity(F_, rows_);
}

bool Mat::operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool Mat::operator<(const Mat& o) const { return a_ < o.a_; }

std::string Mat::str() const {
    std::ostringstream s;
    for (unsigned i = 0; i < rows_; ++i) {
        s << (i ? "; " : "[");
        for (unsigned j = 0; j < cols_; ++j)
            s << (j ? "," : "") << static_cast<unsigned>(at(i, j));
    }
    s << "]";
    return s.str();
}

// ---------------------------------------------------------------------------
// Subspace

Subspace Subspace::zero(const FiniteField& f, unsigned ambient) {
    return Subspace(Mat(f, 0, ambient));
}

Subspace Subspace::full(const FiniteField& f, unsigned ambient) {
    return Subspace(Mat::identity(f, ambient));
}

Subspace Subspace::span(const FiniteField& f, unsigned ambient,
                        const std::vector<Vec>& gens) {
    if (gens.empty()) return zero(f, ambient);
    Mat m = Mat::from_rows(f, gens);
    if (m.cols() != ambient) throw DomainError("generator length mismatch");
    auto piv = rref_in_place(m);
    Mat basis(f, static_cast<unsigned>(piv.size()), ambient);
    for (unsigned i = 0; i < piv.size(); ++i)
        for (unsigned j = 0; j < ambient; ++j) basis.set(i, j, m.at(i, j));
    return Subspace(std::move(basis));
}

Subspace Subspace::row_space(const Mat& m) {
    std::vector<Vec> rows;
    for (unsigned i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    return span(m.field(), m.cols(), rows);
}

Vec Subspace::reduce(Vec v) const {
    const FiniteField& F = field();
    for (unsigned i = 0; i < dim(); ++i) {
        unsigned p = 0;
        while (p < ambient() && basis_.at(i, p) == 0) ++p;
        if (p < ambient() && v[p] != 0) {
            Fe f = v[p];
            for (unsigned j = 0; j < ambient(); ++j)
                v[j] = F.sub(v[j], F.mul(f, basis_.at(i, j)));
        }
    }
    return v;
}

bool Subspace::contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

bool Subspace::contains(const Subspace& s) const {
    for (unsigned i = 0; i < s.dim(); ++i)
        if (!contains(s.basis_.row(i))) return false;
    return true;
}

std::optional<Vec> Subspace::coords(const Vec& v) const {
    const FiniteField& F = field();
    Vec c(dim(), 0), w = v;
    for (unsigned i = 0; i < dim(); ++i) {
        unsigned p = 0;
        while (p < ambient() && basis_.at(i, p) == 0) ++p;
        if (p == ambient()) continue;
        c[i] = w[p];  // pivot entry is 1
        if (w[p] != 0) {
            Fe f = w[p];
            for (unsigned j = 0; j < ambient(); ++j)
                w[j] = F.sub(w[j], F.mul(f, basis_.at(i, j)));
        }
    }
    if (!vec_is_zero(w)) return std::nullopt;
    return c;
}

Subspace Subspace::sum(const Subspace& o) const {
    std::vector<Vec> gens;
    for (unsigned i = 0; i < dim(); ++i) gens.push_back(basis_.row(i));
    for (unsigned i = 0; i < o.dim(); ++i) gens.push_back(o.basis_.row(i));
    return span(field(), ambient(), gens);
}

// Zassenhaus: row reduce [B1 | B1; B2 | 0]; rows with zero left half carry a
// basis of the intersection in the right half.
Subspace Subspace::intersect(const Subspace& o) const {
    const FiniteField& F = field();
    const unsigned n = ambient();
    const unsigned total = dim() + o.dim();
    if (total == 0) return zero(F, n);
    Mat big(F, total, 2 * n);
    for (unsigned i = 0; i < dim(); ++i)
        for (unsigned j = 0; j < n; ++j) {
            big.set(i, j, basis_.at(i, j));
            big.set(i, n + j, basis_.at(i, j));
        }
    for (unsigned i = 0; i < o.dim(); ++i)
        for (unsigned j = 0; j < n; ++j) big.set(dim() + i, j, o.basis_.at(i, j));
    rref_in_place(big);
    std::vector<Vec> gens;
    for (unsigned i = 0; i < total; ++i) {
        bool left_zero = true;
        for (unsigned j = 0; j < n && left_zero; ++j)
            if (big.at(i, j) != 0) left_zero = false;
        if (!left_zero) continue;
        Vec v(n);
        bool nonzero = false;
        for (unsigned j = 0; j < n; ++j) {
            v[j] = big.at(i, n + j);
            nonzero = nonzero || v[j] != 0;
        }
        if (nonzero) gens.push_back(std::move(v));
    }
    return span(F, n, gens);
}

bool Subspace::is_invariant(const Mat& m) const {
    for (unsigned i = 0; i < dim(); ++i)
        if (!contains(m.apply(basis_.row(i)))) return false;
    return true;
}

Vec Subspace::element(std::uint64_t idx) const {
    Vec c = vec_from_index(field(), dim(), idx);
    Vec v(ambient(), 0);
    const FiniteField& F = field();
    for (unsigned i = 0; i < dim(); ++i) {
        if (c[i] == 0) continue;
        for (unsigned j = 0; j < ambient(); ++j)
            v[j] = F.add(v[j], F.mul(c[i], basis_.at(i, j)));
    }
    return v;
}

Subspace image(const Mat& m) { return Subspace::row_space(m); }

Subspace kernel(const Mat& m) {
    // {v : vM = 0} = null space of M^T read as rows.
    const FiniteField& F = m.field();
    Mat t = m.transpose();
    auto piv = rref_in_place(t);
    std::vector<bool> is_piv(m.rows(), false);
    for (unsigned p : piv) is_piv[p] = true;
    std::vector<Vec> gens;
    for (unsigned c = 0; c < m.rows(); ++c) {
        if (is_piv[c]) continue;
        Vec v(m.rows(), 0);
        v[c] = F.one();
        for (unsigned i = 0; i < piv.size(); ++i)
            v[piv[i]] = F.neg(t.at(i, c));
        gens.push_back(std::move(v));
    }
    return Subspace::span(F, m.rows(), gens);
}

std::optional<Vec> solve_left(const Mat& a, const Vec& rhs) {
    if (rhs.size() != a.cols()) throw DomainError("rhs length mismatch");
    const FiniteField& F = a.field();
    // x a = rhs  <=>  a^T x^T = rhs^T: reduce the augmented transpose
    Mat aug(F, a.cols(), a.rows() + 1);
    for (unsigned i = 0; i < a.cols(); ++i) {
        for (unsigned j = 0; j < a.rows(); ++j) aug.set(i, j, a.at(j, i));
        aug.set(i, a.rows(), rhs[i]);
    }
    auto piv = rref_in_place(aug);
    Vec x(a.rows(), 0);
    for (unsigned i = 0; i < piv.size(); ++i) {
        if (piv[i] == a.rows()) return std::nullopt;  // inconsistent
        x[piv[i]] = aug.at(i, a.rows());
    }
    return x;
}

// ---------------------------------------------------------------------------
// Polynomial action and minimal polynomials

Mat eval_at(const Poly& p, const Mat& m) {
    if (m.rows() != m.cols()) throw DomainError("polynomial of a non-square matrix");
    const FiniteField& F = m.field();
    Mat r(F, m.rows(), m.rows());
    for (int i = p.degree(); i >= 0; --i) {
        r = r * m;
        Fe c = p.coeff(static_cast<unsigned>(i));
        if (c != 0)
            for (unsigned d = 0; d < m.rows(); ++d) r.set(d, d, F.add(r.at(d, d), c));
    }
    return r;
}

Poly local_min_poly(const Mat& m, const Vec& v) {
    if (m.rows() != m.cols()) throw DomainError("minimal polynomial of a non-square matrix");
    const FiniteField& F = m.field();
    const unsigned n = m.rows();
    if (vec_is_zero(v)) return Poly::constant(F, F.one());
    // Krylov rows with reduction bookkeeping: each reduced row remembers its
    // expression in powers of m applied to v.
    std::vector<Vec> reduced;
    std::vector<unsigned> lead;
    std::vector<std::vector<Fe>> expr;
    Vec w = v;
    for (unsigned j = 0; j <= n; ++j) {
        Vec cur = w;
        std::vector<Fe> e(j + 1, 0);
        e[j] = F.one();
        for (size_t r = 0; r < reduced.size(); ++r) {
            Fe c = cur[lead[r]];
            if (c == 0) continue;
            Fe f = F.div(c, reduced[r][lead[r]]);
            for (unsigned t = 0; t < n; ++t)
                cur[t] = F.sub(cur[t], F.mul(f, reduced[r][t]));
            for (size_t t = 0; t < expr[r].size(); ++t)
                e[t] = F.sub(e[t], F.mul(f, expr[r][t]));
        }
        if (vec_is_zero(cur)) return Poly(F, std::move(e)).monic();
        unsigned l = 0;
        while (cur[l] == 0) ++l;
        reduced.push_back(cur);
        lead.push_back(l);
        expr.push_back(std::move(e));
        w = m.apply(w);
    }
    throw InternalError("Krylov loop exceeded the ambient dimension");
}

Poly min_poly(const Mat& m) {
    if (m.rows() != m.cols()) throw DomainError("minimal polynomial of a non-square matrix");
    const FiniteField& F = m.field();
    Poly mu = Poly::constant(F, F.one());
    for (unsigned i = 0; i < m.rows(); ++i) {
        Vec e(m.rows(), 0);
        e[i] = F.one();
        mu = poly_lcm(mu, local_min_poly(m, e));
        if (mu.degree() == static_cast<int>(m.rows())) break;
    }
    return mu;
}

std::pair<Subspace, Subspace> path_fix(const Mat& m, unsigned j) {
    if (m.rows() != m.cols()) throw DomainError("path/fix of a non-square matrix");
    Mat p = (m - Mat::identity(m.field(), m.rows())).pow(j);
    return {image(p), kernel(p)};
}

std::pair<Subspace, Subspace> fitting_split(const Mat& m) {
    return path_fix(m, m.rows());
}

std::vector<std::pair<Poly, Subspace>> primary_decomposition(const Mat& m) {
    Poly mu = min_poly(m);
    auto fac = poly_factor(mu);
    std::vector<std::pair<Poly, Subspace>> out;
    unsigned total = 0;
    for (auto& [f, e] : fac) {
        Subspace comp = kernel(eval_at(f.pow(e), m));
        total += comp.dim();
        out.emplace_back(f, std::move(comp));
    }
    if (total != m.rows())
        throw InternalError("primary components do not exhaust the space");
    return out;
}

Subspace cyclic_space(const Mat& m, const Vec& v) {
    std::vector<Vec> orbit;
    Vec w = v;
    for (unsigned i = 0; i <= m.rows(); ++i) {
        orbit.push_back(w);
        w = m.apply(w);
    }
    return Subspace::span(m.field(), m.rows(), orbit);
}

Vec max_order_vector(const Mat& m) {
    const FiniteField& F = m.field();
    const unsigned n = m.rows();
    Poly target = min_poly(m);
    Vec w(n, 0);
    Poly ow = Poly::constant(F, F.one());
    for (unsigned i = 0; i < n && ow != target; ++i) {
        Vec e(n, 0);
        e[i] = F.one();
        Poly oe = local_min_poly(m, e);
        Poly l = poly_lcm(ow, oe);
        if (l == ow) continue;
        if (ow.degree() == 0) {
            w = e;
            ow = oe;
            continue;
        }
        // Split l = A*B with A | ow, B | oe, gcd(A,B) = 1: each prime goes to
        // the side already carrying its full multiplicity in l.
        auto fac = poly_factor(l);
        Poly A = Poly::constant(F, F.one()), B = A;
        for (auto& [f, el] : fac) {
            unsigned ew = 0, ee = 0;
            for (Poly t = ow; (t % f).is_zero(); t = (t / f).monic()) ++ew;
            for (Poly t = oe; (t % f).is_zero(); t = (t / f).monic()) ++ee;
            if (ew >= ee) A = A * f.pow(ew);
            else B = B * f.pow(ee);
        }
        Vec wa = eval_at(ow / A, m).apply(w);  // order A
        Vec vb = eval_at(oe / B, m).apply(e);  // order B
        w = vec_add(F, wa, vb);
        ow = (A * B).monic();
        if (local_min_poly(m, w) != ow)
            throw InternalError("order combination lost the expected order");
    }
    return w;
}

Mat restriction(const Mat& m, const Subspace& s) {
    Mat r(m.field(), s.dim(), s.dim());
    for (unsigned i = 0; i < s.dim(); ++i) {
        auto c = s.coords(m.apply(s.basis().row(i)));
        if (!c) throw DomainError("subspace is not invariant");
        for (unsigned j = 0; j < s.dim(); ++j) r.set(i, j, (*c)[j]);
    }
    return r;
}

std::optional<Vec> cyclic_vector(const Mat& m, const Subspace& s) {
    if (!s.is_invariant(m)) throw DomainError("subspace is not invariant");
    const unsigned d = s.dim();
    if (d == 0) return Vec(s.ambient(), 0);
    Mat r = restriction(m, s);
    Poly mu = min_poly(r);
    if (mu.degree() != static_cast<int>(d)) return std::nullopt;
    // canonical enumeration first (capped), then the deterministic
    // order-combination construction which always succeeds here
    std::uint64_t count = 1;
    for (unsigned i = 0; i < d && count <= 4096; ++i) count *= s.field().q();
    count = std::min<std::uint64_t>(count, 4096);
    for (std::uint64_t idx = 1; idx < count; ++idx) {
        Vec cand = vec_from_index(s.field(), d, idx);
        if (local_min_poly(r, cand) == mu)
            return s.basis().apply(cand);
    }
    Vec w = max_order_vector(r);
    return s.basis().apply(w);
}

std::pair<Mat, Mat> jordan_chevalley(const Mat& m) {
    const FiniteField& F = m.field();
    const unsigned n = m.rows();
    if (!m.inverse()) throw DomainError("Jordan-Chevalley needs an invertible matrix");
    Poly mu = min_poly(m);
    auto fac = poly_factor(mu);
    Poly g = Poly::constant(F, F.one());
    bool squarefree = true;
    for (auto& [f, e] : fac) {
        g = g * f;
        if (e > 1) squarefree = false;
    }
    if (squarefree) return {m, Mat::identity(F, n)};

    // Hensel-lift a root s of the radical g with s = x mod each prime,
    // working in K[x]/(mu). Irreducible polynomials over a finite field are
    // separable, so g'(s) stays invertible modulo mu throughout.
    auto inv_mod = [&](const Poly& a, const Poly& mod) {
        Poly r0 = mod, r1 = a % mod;
        Poly s0 = Poly(F), s1 = Poly::constant(F, F.one());
        while (!r1.is_zero()) {
            auto [q, r2] = r0.divmod(r1);
            Poly s2 = s0 - q * s1;
            r0 = r1;
            r1 = r2;
            s0 = s1;
            s1 = s2;
        }
        if (r0.degree() != 0) throw InternalError("expected a unit modulo mu");
        return (s0.scaled(F.inv(r0.coeff(0)))) % mod;
    };
    auto compose_mod = [&](const Poly& f, const Poly& s, const Poly& mod) {
        Poly r(F);
        for (int i = f.degree(); i >= 0; --i) {
            r = (r * s) % mod;
            r = r + Poly::constant(F, f.coeff(static_cast<unsigned>(i)));
        }
        return r;
    };

    Poly s = Poly::x(F) % mu;
    Poly gp = g.derivative();
    for (int iter = 0; iter < 64; ++iter) {
        Poly gs = compose_mod(g, s, mu);
        if (gs.is_zero()) break;
        Poly w = inv_mod(compose_mod(gp, s, mu), mu);
        s = (s - gs * w) % mu;
    }
    if (!compose_mod(g, s, mu).is_zero())
        throw InternalError("Hensel lifting did not converge");

    Mat S = eval_at(s, m);
    Poly t = inv_mod(s, mu);
    Mat U = m * eval_at(t, m);
    if (!(S * U == m) || !(U * S == m))
        throw InternalError("Jordan-Chevalley factors do not multiply back");
    Poly mus = min_poly(S);
    if (poly_gcd(mus, mus.derivative()).degree() != 0)
        throw InternalError("semisimple factor is not semisimple");
    if (!(U - Mat::identity(F, n)).pow(n).is_zero())
        throw InternalError("unipotent factor is not unipotent");
    return {S, U};
}

// ---------------------------------------------------------------------------
// Cyclic decomposition, invariant factors, similarity

namespace {

// Solves for a module projection P: P commutes with R, every row of P lies
// in U, and P restricts to the identity on U. The kernel of P is then an
// R-invariant complement of U. Solvable whenever U is spanned by a vector of
// maximal order.
Mat module_projection(const Mat& r, const Subspace& u) {
    const FiniteField& F = r.field();
    const unsigned k = r.rows(), d = u.dim();
    Mat bu = u.basis();
    auto ns = kernel(bu.transpose());  // {x : bu x^T = 0}, so U = {v : v.x = 0 for all x}
    const unsigned nu = k * k;
    std::vector<Vec> eqs;  // coefficient rows with the rhs appended
    auto eq_row = [&]() { return Vec(nu + 1, 0); };
    // (1) R P = P R
    for (unsigned a = 0; a < k; ++a)
        for (unsigned b = 0; b < k; ++b) {
            Vec e = eq_row();
            for (unsigned t = 0; t < k; ++t) {
                e[t * k + b] = F.add(e[t * k + b], r.at(a, t));
                e[a * k + t] = F.sub(e[a * k + t], r.at(t, b));
            }
            eqs.push_back(std::move(e));
        }
    // (2) rows of P lie in U: P annihilates every right-kernel generator of U
    for (unsigned g = 0; g < ns.dim(); ++g) {
        Vec x = ns.basis().row(g);
        for (unsigned a = 0; a < k; ++a) {
            Vec e = eq_row();
            for (unsigned t = 0; t < k; ++t) e[a * k + t] = x[t];
            eqs.push_back(std::move(e));
        }
    }
    // (3) identity on U
    for (unsigned i = 0; i < d; ++i)
        for (unsigned b = 0; b < k; ++b) {
            Vec e = eq_row();
            for (unsigned t = 0; t < k; ++t) e[t * k + b] = bu.at(i, t);
            e[nu] = bu.at(i, b);
            eqs.push_back(std::move(e));
        }
    Mat sys = Mat::from_rows(F, eqs);
    auto piv = rref_in_place(sys);
    Vec sol(nu, 0);  // canonical solution: free unknowns zero
    for (unsigned i = 0; i < piv.size(); ++i) {
        if (piv[i] == nu) throw InternalError("projection system is inconsistent");
        sol[piv[i]] = sys.at(i, nu);
    }
    Mat p(F, k, k);
    for (unsigned a = 0; a < k; ++a)
        for (unsigned b = 0; b < k; ++b) p.set(a, b, sol[a * k + b]);
    return p;
}

} // namespace

std::vector<std::pair<Vec, Poly>> cyclic_decomposition(const Mat& m) {
    if (m.rows() != m.cols()) throw DomainError("cyclic decomposition of a non-square matrix");
    const FiniteField& F = m.field();
    const unsigned n = m.rows();
    std::vector<std::pair<Vec, Poly>> gens;
    Subspace current = Subspace::full(F, n);
    Poly prev = Poly(F);
    while (current.dim() > 0) {
        Mat r = restriction(m, current);
        Vec wl = max_order_vector(r);
        Poly mu = local_min_poly(r, wl);
        if (!prev.is_zero() && !(prev % mu).is_zero())
            throw InternalError("invariant factors do not form a divisor chain");
        prev = mu;
        Vec ambient_gen = current.basis().apply(wl);
        gens.emplace_back(ambient_gen, mu);
        if (mu.degree() == static_cast<int>(current.dim())) break;
        Subspace ul = cyclic_space(r, wl);
        Mat p = module_projection(r, ul);
        Subspace wloc = kernel(p);
        if (wloc.dim() + ul.dim() != current.dim() ||
            wloc.intersect(ul).dim() != 0 || !wloc.is_invariant(r))
            throw InternalError("module complement construction failed");
        std::vector<Vec> new_gens;
        for (unsigned i = 0; i < wloc.dim(); ++i)
            new_gens.push_back(current.basis().apply(wloc.basis().row(i)));
        current = Subspace::span(F, n, new_gens);
    }
    return gens;
}

std::vector<Poly> invariant_factors(const Mat& m) {
    std::vector<Poly> out;
    for (auto& [v, mu] : cyclic_decomposition(m)) out.push_back(mu);
    return out;
}

std::vector<std::pair<Poly, unsigned>> elementary_divisors(const Mat& m) {
    Poly mu = min_poly(m);
    auto fac = poly_factor(mu);
    std::vector<std::pair<Poly, unsigned>> out;
    for (auto& [f, emax] : fac) {
        const unsigned df = static_cast<unsigned>(f.degree());
        std::vector<unsigned> kd{0};  // kernel dims of f(M)^j
        Mat fm = eval_at(f, m);
        Mat pw = Mat::identity(m.field(), m.rows());
        for (unsigned j = 1; j <= emax; ++j) {
            pw = pw * fm;
            kd.push_back(kernel(pw).dim());
        }
        std::vector<unsigned> ge(emax + 2, 0);  // count with exponent >= j
        for (unsigned j = 1; j <= emax; ++j) ge[j] = (kd[j] - kd[j - 1]) / df;
        for (unsigned j = 1; j <= emax; ++j)
            for (unsigned c = ge[j] - ge[j + 1]; c-- > 0;) out.emplace_back(f, j);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first < b.first) return true;
        if (b.first < a.first) return false;
        return a.second < b.second;
    });
    return out;
}

std::optional<Mat> module_similar(const Mat& a, const Mat& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw DomainError("similarity needs square matrices of equal size");
    auto da = cyclic_decomposition(a);
    auto db = cyclic_decomposition(b);
    if (da.size() != db.size()) return std::nullopt;
    for (size_t i = 0; i < da.size(); ++i)
        if (da[i].second != db[i].second) return std::nullopt;
    const FiniteField& F = a.field();
    auto basis_of = [&](const Mat& m, const std::vector<std::pair<Vec, Poly>>& dec) {
        std::vector<Vec> rows;
        for (auto& [gen, mu] : dec) {
            Vec w = gen;
            for (int j = 0; j < mu.degree(); ++j) {
                rows.push_back(w);
                w = m.apply(w);
            }
        }
        return Mat::from_rows(F, rows);
    };
    Mat ra = basis_of(a, da), rb = basis_of(b, db);
    auto rai = ra.inverse();
    if (!rai || !rb.inverse()) throw InternalError("cyclic decomposition basis is singular");
    Mat c = *rai * rb;
    auto ci = c.inverse();
    if (!ci || !(*ci * a * c == b))
        throw InternalError("similarity construction failed to conjugate");
    return c;
}

} // namespace soq
