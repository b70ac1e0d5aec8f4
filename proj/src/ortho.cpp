#include "soq/ortho.hpp"

namespace soq {

bool is_orthogonal(const QuadSpace& sp, const Mat& m) {
    if (m.rows() != sp.dim() || m.cols() != sp.dim())
        throw DomainError("matrix size does not match the space");
    if (m.field() != sp.field()) throw DomainError("field mismatch");
    Mat mu = m * sp.gram_upper() * m.transpose();
    for (unsigned i = 0; i < sp.dim(); ++i)
        if (mu.at(i, i) != sp.gram_upper().at(i, i)) return false;
    return m * sp.bilinear() * m.transpose() == sp.bilinear();
}

OrthMap::OrthMap(QuadSpace sp, Mat m)
    : sp_(std::move(sp)), m_(std::move(m)), minpoly_(m_.field()), path_dim_(0) {
    if (!is_orthogonal(sp_, m_))
        throw DomainError("matrix does not preserve the quadratic form");
    minpoly_ = soq::min_poly(m_);
    path_dim_ = sp_.dim() - path_fix(m_, 1).second.dim();
}

OrthMap OrthMap::operator*(const OrthMap& o) const {
    if (!(sp_ == o.sp_)) throw DomainError("composition across different spaces");
    return OrthMap(sp_, m_ * o.m_);
}

OrthMap OrthMap::inverse() const {
    auto inv = m_.inverse();
    if (!inv) throw InternalError("orthogonal map without an inverse");
    return OrthMap(sp_, *inv);
}

bool OrthMap::is_involution() const { return (m_ * m_).is_identity(); }

bool OrthMap::is_unipotent() const {
    Poly xm1 = Poly::from_ints(m_.field(), {-1, 1});
    Poly t = minpoly_;
    while ((t % xm1).is_zero()) t = (t / xm1).monic();
    return t.degree() == 0;
}

OrthMap reflection(const QuadSpace& sp, const Vec& b) {
    if (b.size() != sp.dim()) throw DomainError("vector length mismatch");
    const FiniteField& F = sp.field();
    Fe qb = sp.eval_q(b);
    if (qb == 0) throw DomainError("reflection vector must be anisotropic");
    Fe qbi = F.inv(qb);
    Mat m(F, sp.dim(), sp.dim());
    for (unsigned i = 0; i < sp.dim(); ++i) {
        Vec e(sp.dim(), 0);
        e[i] = F.one();
        Fe c = F.mul(sp.eval_f(e, b), qbi);
        for (unsigned j = 0; j < sp.dim(); ++j)
            m.set(i, j, F.sub(i == j ? F.one() : F.zero(), F.mul(c, b[j])));
    }
    return OrthMap(sp, std::move(m));
}

namespace {

// First anisotropic vector of a subspace in canonical enumeration order,
// optionally skipping one excluded vector; nullopt if all are isotropic.
std::optional<Vec> first_anisotropic(const QuadSpace& sp, const Subspace& s,
                                     const Vec* skip = nullptr) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < s.dim(); ++i) count *= sp.field().q();
    for (std::uint64_t idx = 1; idx < count; ++idx) {
        Vec v = s.element(idx);
        if (sp.eval_q(v) == 0) continue;
        if (skip && v == *skip) continue;
        return v;
    }
    return std::nullopt;
}

} // namespace

std::vector<Vec> reflection_factorization(const OrthMap& phi) {
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    // Peel reflections on the right: cur -> cur * refl(b). Then
    // phi = refl(b_k) * ... * refl(b_1), so collect in reverse.
    Mat cur = phi.mat();
    std::vector<Vec> rev;
    std::optional<Vec> last_bump;  // never peel the bump straight back off
    const unsigned guard = 2 * sp.dim() + 4;
    while (!cur.is_identity()) {
        if (rev.size() > guard)
            throw InternalError("reflection factorization exceeded its length bound");
        Subspace path = image(cur - Mat::identity(F, sp.dim()));
        std::optional<Vec> b =
            first_anisotropic(sp, path, last_bump ? &*last_bump : nullptr);
        if (b) {
            // an anisotropic vector of the path always shrinks the path by 1
            Mat next = cur * reflection(sp, *b).mat();
            unsigned after = image(next - Mat::identity(F, sp.dim())).dim();
            if (after != path.dim() - 1)
                throw InternalError("descent step failed to shrink the path");
            rev.push_back(*b);
            cur = next;
            last_bump.reset();
        } else {
            // totally isotropic path: extend with the smallest anisotropic
            // vector of the whole space, then keep descending
            std::optional<Vec> c = first_anisotropic(sp, Subspace::full(F, sp.dim()));
            if (!c) throw InternalError("space without anisotropic vectors");
            rev.push_back(*c);
            cur = cur * reflection(sp, *c).mat();
            last_bump = *c;
        }
    }
    std::vector<Vec> word(rev.rbegin(), rev.rend());
    Mat acc = Mat::identity(F, sp.dim());
    for (const Vec& b : word) acc = acc * reflection(sp, b).mat();
    if (!(acc == phi.mat()))
        throw InternalError("reflection word does not multiply back");
    return word;
}

OrthMap full_path_element(const QuadSpace& sp) {
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    // greedy anisotropic basis in canonical order
    std::vector<Vec> basis;
    Subspace spanned = Subspace::zero(F, n);
    std::uint64_t count = 1;
    bool cap = false;
    for (unsigned i = 0; i < n; ++i) {
        count *= F.q();
        if (count > (1ULL << 40)) { cap = true; break; }
    }
    for (std::uint64_t idx = 1; (cap || idx < count) && basis.size() < n; ++idx) {
        Vec v = vec_from_index(F, n, idx);
        if (sp.eval_q(v) == 0) continue;
        if (spanned.contains(v)) continue;
        basis.push_back(v);
        std::vector<Vec> gens = basis;
        spanned = Subspace::span(F, n, gens);
        if (cap && idx > (1ULL << 22)) break;
    }
    if (basis.size() < n)
        throw DomainError("no anisotropic basis: the space is the hyperbolic plane over GF(2)");
    Mat prod = Mat::identity(F, n);
    for (const Vec& b : basis) prod = prod * reflection(sp, b).mat();
    OrthMap psi(sp, prod);
    if (psi.path_dim() != n || psi.fix_space().dim() != 0)
        throw InternalError("anisotropic-basis product is not fixed-point-free");
    return psi;
}

} // namespace soq
