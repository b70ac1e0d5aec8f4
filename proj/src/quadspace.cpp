#include "soq/quadspace.hpp"

namespace soq {

QuadSpace::QuadSpace(FiniteField f, Mat gram_upper)
    : F_(std::move(f)), n_(gram_upper.rows()),
      gram_(std::move(gram_upper)), bil_(F_, n_, n_) {
    if (gram_.rows() != gram_.cols())
        throw DomainError("Gram matrix must be square");
    for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < i; ++j)
            if (gram_.at(i, j) != 0)
                throw DomainError("Gram matrix must be upper-triangular");
    bil_ = gram_ + gram_.transpose();
    if (n_ == 0) throw DomainError("zero-dimensional space");
    if (!bil_.inverse())
        throw DomainError("form is defective (singular bilinear form)");
}

QuadSpace QuadSpace::hyperbolic(const FiniteField& f, unsigned m) {
    if (m == 0) throw DomainError("hyperbolic space needs m >= 1");
    Mat u(f, 2 * m, 2 * m);
    for (unsigned i = 0; i < m; ++i) u.set(i, m + i, f.one());
    return QuadSpace(f, std::move(u));
}

QuadSpace QuadSpace::anisotropic_plane(const FiniteField& f) {
    Mat u(f, 2, 2);
    if (f.p() == 2) {
        // x^2 + xy + c y^2 with trace(c) = 1, smallest such c
        Fe c = 0;
        for (unsigned a = 0; a < f.q(); ++a)
            if (f.trace2(static_cast<Fe>(a)) == 1) { c = static_cast<Fe>(a); break; }
        u.set(0, 0, f.one());
        u.set(0, 1, f.one());
        u.set(1, 1, c);
    } else {
        // x^2 - d y^2 with d the smallest nonsquare
        std::vector<bool> sq(f.q(), false);
        for (unsigned a = 0; a < f.q(); ++a) sq[f.mul(static_cast<Fe>(a), static_cast<Fe>(a))] = true;
        Fe d = 0;
        for (unsigned a = 1; a < f.q(); ++a)
            if (!sq[a]) { d = static_cast<Fe>(a); break; }
        if (d == 0) throw DomainError("no anisotropic plane over this field");
        u.set(0, 0, f.one());
        u.set(1, 1, f.neg(d));
    }
    return QuadSpace(f, std::move(u));
}

QuadSpace QuadSpace::minus_type(const FiniteField& f, unsigned m) {
    if (m == 0) throw DomainError("minus-type space needs m >= 1");
    if (m == 1) return anisotropic_plane(f);
    return orthogonal_sum(hyperbolic(f, m - 1), anisotropic_plane(f));
}

QuadSpace QuadSpace::orthogonal_sum(const QuadSpace& a, const QuadSpace& b) {
    if (a.field() != b.field()) throw DomainError("field mismatch");
    const unsigned n = a.dim() + b.dim();
    Mat u(a.field(), n, n);
    for (unsigned i = 0; i < a.dim(); ++i)
        for (unsigned j = 0; j < a.dim(); ++j) u.set(i, j, a.gram_.at(i, j));
    for (unsigned i = 0; i < b.dim(); ++i)
        for (unsigned j = 0; j < b.dim(); ++j)
            u.set(a.dim() + i, a.dim() + j, b.gram_.at(i, j));
    return QuadSpace(a.field(), std::move(u));
}

Fe QuadSpace::eval_q(const Vec& v) const {
    if (v.size() != n_) throw DomainError("vector length mismatch");
    Fe acc = 0;
    for (unsigned i = 0; i < n_; ++i) {
        if (v[i] == 0) continue;
        for (unsigned j = i; j < n_; ++j)
            acc = F_.add(acc, F_.mul(F_.mul(v[i], v[j]), gram_.at(i, j)));
    }
    return acc;
}

Fe QuadSpace::eval_f(const Vec& u, const Vec& w) const {
    if (u.size() != n_ || w.size() != n_) throw DomainError("vector length mismatch");
    Fe acc = 0;
    for (unsigned i = 0; i < n_; ++i) {
        if (u[i] == 0) continue;
        for (unsigned j = 0; j < n_; ++j)
            acc = F_.add(acc, F_.mul(F_.mul(u[i], w[j]), bil_.at(i, j)));
    }
    return acc;
}

Subspace QuadSpace::orthogonal_complement(const Subspace& w) const {
    if (w.ambient() != n_) throw DomainError("ambient dimension mismatch");
    if (w.dim() == 0) return Subspace::full(F_, n_);
    // v in W-perp  iff  v * (B * basis^T) = 0
    Mat bw = bil_ * w.basis().transpose();  // n x dim(W)
    return kernel(bw);
}

Subspace QuadSpace::radical(const Subspace& w) const {
    return w.intersect(orthogonal_complement(w));
}

bool QuadSpace::is_totally_isotropic(const Subspace& w) const {
    // Q vanishes on W iff it vanishes on a basis and f vanishes pairwise.
    for (unsigned i = 0; i < w.dim(); ++i) {
        Vec bi = w.basis().row(i);
        if (eval_q(bi) != 0) return false;
        for (unsigned j = i + 1; j < w.dim(); ++j)
            if (eval_f(bi, w.basis().row(j)) != 0) return false;
    }
    return true;
}

bool QuadSpace::is_totally_degenerate(const Subspace& w) const {
    for (unsigned i = 0; i < w.dim(); ++i)
        for (unsigned j = i; j < w.dim(); ++j)
            if (eval_f(w.basis().row(i), w.basis().row(j)) != 0) return false;
    return true;
}

bool QuadSpace::is_nondefective_subspace(const Subspace& w) const {
    return radical(w).dim() == 0;
}

WittDecomposition QuadSpace::witt_decompose() const {
    WittDecomposition out{{}, Subspace::zero(F_, n_)};
    Subspace current = Subspace::full(F_, n_);
    for (;;) {
        const unsigned d = current.dim();
        if (d == 0) {
            out.kernel = current;
            return out;
        }
        // canonical-order search for a nonzero isotropic vector of `current`
        std::uint64_t count = 1;
        bool overflow = false;
        for (unsigned i = 0; i < d; ++i) {
            count *= F_.q();
            if (count > (1ULL << 40)) { overflow = true; break; }
        }
        Vec e;
        bool found = false;
        for (std::uint64_t idx = 1; !overflow && idx < count; ++idx) {
            Vec cand = current.element(idx);
            if (eval_q(cand) == 0) {
                e = cand;
                found = true;
                break;
            }
        }
        if (!found) {
            // anisotropic kernel (over a finite field this has dim <= 2)
            out.kernel = current;
            return out;
        }
        // partner with f(e, w) = 1, then made isotropic
        Vec w;
        for (unsigned i = 0; i < d; ++i) {
            Vec b = current.basis().row(i);
            Fe fe = eval_f(e, b);
            if (fe != 0) { w = vec_scaled(F_, b, F_.inv(fe)); break; }
        }
        if (w.empty()) throw InternalError("isotropic vector with no partner in a nondegenerate space");
        w = vec_sub(F_, w, vec_scaled(F_, e, eval_q(w)));  // Q(w - Q(w)e) = 0
        out.pairs.emplace_back(e, w);
        // pass to the orthogonal complement of the split plane
        Subspace plane = Subspace::span(F_, n_, {e, w});
        current = current.intersect(orthogonal_complement(plane));
    }
}

unsigned QuadSpace::witt_index() const {
    return static_cast<unsigned>(witt_decompose().pairs.size());
}

unsigned QuadSpace::arf_invariant() const {
    if (F_.p() != 2) throw DomainError("Arf invariant requires characteristic 2");
    // symplectic basis of the alternating form B, built by canonical search
    Subspace current = Subspace::full(F_, n_);
    Fe acc = 0;
    while (current.dim() > 0) {
        Vec e = current.basis().row(0);
        Vec w;
        for (unsigned i = 1; i < current.dim(); ++i) {
            Vec b = current.basis().row(i);
            Fe fe = eval_f(e, b);
            if (fe != 0) { w = vec_scaled(F_, b, F_.inv(fe)); break; }
        }
        if (w.empty()) throw InternalError("alternating form degenerate on residual space");
        acc = F_.add(acc, F_.mul(eval_q(e), eval_q(w)));
        Subspace plane = Subspace::span(F_, n_, {e, w});
        current = current.intersect(orthogonal_complement(plane));
    }
    return F_.trace2(acc);
}

QuadQuotient QuadSpace::quotient_form(const Subspace& w) const {
    Subspace rad = radical(w);
    if (!is_totally_isotropic(rad))
        throw DomainError("radical of the subspace is not totally isotropic");
    // transversal: basis vectors of W independent over rad
    std::vector<Vec> trans;
    Subspace acc = rad;
    for (unsigned i = 0; i < w.dim(); ++i) {
        Vec b = w.basis().row(i);
        if (!acc.contains(b)) {
            trans.push_back(b);
            std::vector<Vec> gens = trans;
            for (unsigned r = 0; r < rad.dim(); ++r) gens.push_back(rad.basis().row(r));
            acc = Subspace::span(F_, n_, gens);
        }
    }
    const unsigned m = static_cast<unsigned>(trans.size());
    if (m == 0) throw DomainError("quotient form on a totally degenerate subspace is empty");
    Mat u(F_, m, m);
    for (unsigned i = 0; i < m; ++i) {
        u.set(i, i, eval_q(trans[i]));
        for (unsigned j = i + 1; j < m; ++j) u.set(i, j, eval_f(trans[i], trans[j]));
    }
    return QuadQuotient{QuadSpace(F_, std::move(u)), Mat::from_rows(F_, trans), rad};
}

QuadQuotient QuadSpace::restrict_to(const Subspace& w) const {
    if (radical(w).dim() != 0)
        throw DomainError("restriction requires a nondefective subspace");
    return quotient_form(w);
}

} // namespace soq
