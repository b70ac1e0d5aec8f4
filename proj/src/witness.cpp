#include "soq/witness.hpp"

#include <algorithm>

namespace soq {

namespace {

Poly xplus1_pow(const FiniteField& F, unsigned e) {
    return Poly::from_ints(F, {1, 1}).pow(e);
}

bool pattern_type1(const Mat& m, unsigned* exp_out) {
    auto eld = elementary_divisors(m);
    if (eld.size() != 2 || !(eld[0] == eld[1])) return false;
    const Poly& f = eld[0].first;
    const FiniteField& F = m.field();
    if (f.degree() != 1) return false;
    Fe c = f.coeff(0);
    if (c != F.one() && c != F.neg(F.one())) return false;
    if (exp_out) *exp_out = eld[0].second;
    return true;
}

// Solves sum_i lambda_i f(basis_i, anchor-form) = target over a subspace.
// Returns a vector t in `space` with f(t, u) = c, or nullopt.
std::optional<Vec> solve_pairing_shift(const QuadSpace& sp, const Subspace& space,
                                       const Vec& u, Fe c) {
    const FiniteField& F = sp.field();
    std::vector<Fe> coef(space.dim());
    int pivot = -1;
    for (unsigned i = 0; i < space.dim(); ++i) {
        coef[i] = sp.eval_f(space.basis().row(i), u);
        if (coef[i] != 0 && pivot < 0) pivot = static_cast<int>(i);
    }
    if (pivot < 0) {
        if (c == 0) return Vec(sp.dim(), 0);
        return std::nullopt;
    }
    Vec t = vec_scaled(F, space.basis().row(static_cast<unsigned>(pivot)),
                       F.div(c, coef[static_cast<unsigned>(pivot)]));
    return t;
}

} // namespace

PairedBasis paired_basis_type1o(const OrthMap& phi) {
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    if (F.p() != 2) throw DomainError("paired basis requires characteristic 2");
    unsigned expm = 0;
    if (!pattern_type1(phi.mat(), &expm) || expm % 2 == 0)
        throw DomainError("paired basis requires an indecomposable type-1o input");
    const unsigned n = sp.dim();
    const Mat& m = phi.mat();

    std::function<PairedBasis(const QuadSpace&, const Mat&, unsigned)> build =
        [&](const QuadSpace& space, const Mat& mm, unsigned mexp) -> PairedBasis {
        const unsigned dim = space.dim();
        if (mexp == 1) {
            // the map is the identity: first canonical independent pair with
            // equal values of Q
            std::uint64_t count = 1;
            for (unsigned i = 0; i < dim; ++i) count *= F.q();
            for (std::uint64_t i1 = 1; i1 < count; ++i1) {
                Vec x = vec_from_index(F, dim, i1);
                for (std::uint64_t i2 = i1 + 1; i2 < count; ++i2) {
                    Vec z = vec_from_index(F, dim, i2);
                    if (space.eval_q(x) != space.eval_q(z)) continue;
                    if (Subspace::span(F, dim, {x, z}).dim() != 2) continue;
                    return {x, z, 1};
                }
            }
            throw InternalError("no equal-value pair on a plane");
        }
        auto [bahn, fix] = path_fix(mm, 1);
        if (!space.is_totally_isotropic(fix))
            throw InternalError("fix space of a type-1o map is not totally isotropic");
        auto quot = space.quotient_form(bahn);
        if (!(quot.radical == fix))
            throw InternalError("radical of the path space is not the fix space");
        // induced transformation in quotient coordinates
        const unsigned qd = quot.space.dim();
        std::vector<Vec> frame;
        for (unsigned i = 0; i < qd; ++i) frame.push_back(quot.transversal.row(i));
        for (unsigned i = 0; i < fix.dim(); ++i) frame.push_back(fix.basis().row(i));
        Mat frame_m = Mat::from_rows(F, frame);
        Mat qmap(F, qd, qd);
        for (unsigned i = 0; i < qd; ++i) {
            auto c = solve_left(frame_m, mm.apply(quot.transversal.row(i)));
            if (!c) throw InternalError("path space is not invariant");
            for (unsigned j = 0; j < qd; ++j) qmap.set(i, j, (*c)[j]);
        }
        PairedBasis inner = build(quot.space, qmap, mexp - 2);
        Vec u = quot.transversal.apply(inner.x);
        Vec w = quot.transversal.apply(inner.z);

        Mat mp1 = mm - Mat::identity(F, dim);
        auto x0 = solve_left(mp1, u);
        auto z0 = solve_left(mp1, w);
        if (!x0 || !z0) throw InternalError("path vectors without preimages");
        Vec x = *x0, z = *z0;
        // shift z inside fix^2 so that f(u, z phi) = 0, the base case of the
        // cross-pairing symmetry
        auto [b2, f2] = path_fix(mm, 2);
        Vec anchor = mm.inverse().value().apply(u);  // u phi^{-1}
        auto t = solve_pairing_shift(space, f2, anchor,
                                     space.eval_f(u, mm.apply(z)));
        if (!t) throw InternalError("no fix^2 shift reaching the cross-pairing base");
        z = vec_add(F, z, *t);
        // shift z inside fix to equalize Q
        auto s = solve_pairing_shift(space, fix, z,
                                     F.sub(space.eval_q(x), space.eval_q(z)));
        if (!s) {
            // z happens to be orthogonal to fix: shift x instead
            auto s2 = solve_pairing_shift(space, fix, x,
                                          F.sub(space.eval_q(z), space.eval_q(x)));
            if (!s2) throw InternalError("no fix shift equalizing Q");
            x = vec_add(F, x, *s2);
        } else {
            z = vec_add(F, z, *s);
        }
        return {x, z, mexp};
    };

    PairedBasis pb = build(sp, m, expm);
    pb.m = expm;
    // exact verification of all four conditions
    if (cyclic_space(m, pb.x).sum(cyclic_space(m, pb.z)).dim() != n)
        throw InternalError("paired basis does not span");
    if (sp.eval_q(pb.x) != sp.eval_q(pb.z))
        throw InternalError("paired basis values of Q differ");
    Vec xk = pb.x, zk = pb.z;
    Vec znext = m.apply(pb.z);
    for (unsigned k = 1; k <= n; ++k) {
        xk = m.apply(xk);
        zk = m.apply(zk);
        znext = m.apply(znext);
        if (sp.eval_f(pb.x, xk) != sp.eval_f(pb.z, zk))
            throw InternalError("paired basis self-pairing condition failed");
        // cross-pairing: f(x phi^k, z) = f(x, z phi^{k+1})
        if (sp.eval_f(xk, pb.z) != sp.eval_f(pb.x, znext))
            throw InternalError("paired basis cross-pairing condition failed");
    }
    return pb;
}

namespace {

// shift-register involution from the paired basis: x phi^k -> z phi^{-k}
Mat paired_basis_inverter(const OrthMap& phi, const PairedBasis& pb) {
    const FiniteField& F = phi.space().field();
    const unsigned m = pb.m, n = phi.dim();
    Mat minv = phi.inverse().mat();
    std::vector<Vec> rows, imgs;
    Vec xf = pb.x, zf = pb.z, xb = pb.x, zb = pb.z;
    for (unsigned j = 0; j < m; ++j) {
        rows.push_back(xf);                 // x phi^j
        imgs.push_back(zb);                 // z phi^{-j}
        rows.push_back(zb);
        imgs.push_back(xf);
        xf = phi.mat().apply(xf);
        zb = minv.apply(zb);
    }
    (void)zf;
    (void)xb;
    rows.resize(n);
    imgs.resize(n);
    Mat r = Mat::from_rows(F, rows);
    Mat ri = r.inverse() ? *r.inverse() : Mat(F, n, n);
    if (ri.is_zero()) throw InternalError("paired basis rows are dependent");
    return ri * Mat::from_rows(F, imgs);
}

} // namespace

OrthMap square_root_type1o(const OrthMap& phi) {
    TypeLabel lab = classify_summand(phi);  // DomainError if decomposable
    if (lab.kind == TypeKind::Type1e)
        throw NoSquareRoot("type-1e transformations have no orthogonal square root");
    if (lab.kind != TypeKind::Type1o)
        throw DomainError("square-root construction applies to type-1 inputs");
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    PairedBasis pb = paired_basis_type1o(phi);
    // psi: x phi^j -> z phi^{j+1}, z phi^j -> x phi^j
    std::vector<Vec> rows, imgs;
    Vec xj = pb.x, zj = pb.z;
    for (unsigned j = 0; j < pb.m; ++j) {
        rows.push_back(xj);
        imgs.push_back(phi.mat().apply(zj));
        rows.push_back(zj);
        imgs.push_back(xj);
        xj = phi.mat().apply(xj);
        zj = phi.mat().apply(zj);
    }
    Mat r = Mat::from_rows(F, rows);
    auto ri = r.inverse();
    if (!ri) throw InternalError("paired basis rows are dependent");
    Mat psi_m = *ri * Mat::from_rows(F, imgs);
    OrthMap psi(sp, psi_m);
    if (!(psi_m * psi_m == phi.mat()))
        throw InternalError("square root does not square back");
    if (psi.is_special())
        throw InternalError("square root landed in the special subgroup");
    if (!psi.is_unipotent() || psi.min_poly().degree() != static_cast<int>(n))
        throw InternalError("square root is not cyclic unipotent");
    return psi;
}

std::vector<Mat> reversing_involutions(const QuadSpace& sp, const Mat& a,
                                       unsigned cap_bits) {
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    auto ai = a.inverse();
    if (!ai) throw DomainError("reversing space of a singular matrix");
    const unsigned nu = n * n;
    std::vector<Vec> eqs;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            Vec e(nu, 0);
            for (unsigned t = 0; t < n; ++t) {
                e[i * n + t] = F.add(e[i * n + t], a.at(t, j));        // (X a)_{ij}
                e[t * n + j] = F.sub(e[t * n + j], ai->at(i, t));      // -(a^{-1} X)_{ij}
            }
            eqs.push_back(std::move(e));
        }
    Mat em = Mat::from_rows(F, eqs);
    Subspace sols = kernel(em.transpose());
    std::uint64_t combos = 1;
    for (unsigned i = 0; i < sols.dim(); ++i) {
        combos *= F.q();
        if (combos > (1ULL << cap_bits))
            throw ResourceError("reversing space too large to enumerate");
    }
    std::vector<Mat> found;
    Mat id = Mat::identity(F, n);
    for (std::uint64_t code = 1; code < combos; ++code) {
        Vec cv = vec_from_index(F, sols.dim(), code);
        Vec flat = sols.basis().apply(cv);
        Mat x(F, n, n);
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) x.set(i, j, flat[i * n + j]);
        if (!(x * x == id)) continue;
        if (!is_orthogonal(sp, x)) continue;
        found.push_back(std::move(x));
    }
    return found;
}

namespace {

unsigned fix_dim_of(const Mat& m) {
    return kernel(m - Mat::identity(m.field(), m.rows())).dim();
}

// All inverting-involution candidates for one indecomposable transformation,
// canonical order within each construction family.
std::vector<Mat> inverter_menu(const QuadSpace& sp, const Mat& m,
                               const TypeLabel& lab) {
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    std::vector<Mat> menu;
    OrthMap phi(sp, m);
    if (F.p() == 2 && lab.kind == TypeKind::Type1o) {
        PairedBasis pb = paired_basis_type1o(phi);
        Mat sigma0 = paired_basis_inverter(phi, pb);
        Mat pw = Mat::identity(F, n);
        for (unsigned j = 0; j < 2 * pb.m; ++j) {
            menu.push_back(pw * sigma0);
            pw = pw * m;
        }
        // involutions inverting the cyclic square root invert phi as well,
        // and they realize the other fix dimension; the root's reversing
        // space has dimension n only
        OrthMap root = square_root_type1o(phi);
        for (auto& x : reversing_involutions(sp, root.mat()))
            menu.push_back(x);
    } else if (F.p() == 2 && lab.kind == TypeKind::Type1e) {
        OrthMap eta = cyclic_cover_type1e(phi);
        auto invs = reversing_involutions(sp, eta.mat());
        for (auto& x : invs) menu.push_back(x);
    } else {
        // cyclic inputs and the odd-characteristic bicyclic case: the
        // reversing coset of the transformation itself
        auto invs = reversing_involutions(sp, m);
        for (auto& x : invs) menu.push_back(x);
    }
    if ((m * m).is_identity()) {
        menu.push_back(Mat::identity(F, n));
        menu.push_back(m);
    }
    if (menu.size() < 2) {
        // widen with the full reversing coset when it is small enough
        try {
            auto invs = reversing_involutions(sp, m, 16);
            for (auto& x : invs) menu.push_back(x);
        } catch (const ResourceError&) {
        }
    }
    // keep genuine inverting involutions only, dedup, canonical order
    std::vector<Mat> out;
    Mat id = Mat::identity(F, n);
    auto mi = m.inverse().value();
    for (auto& x : menu) {
        if (!(x * x == id)) continue;
        if (!(x * m * x == mi)) continue;
        if (!is_orthogonal(sp, x)) continue;
        bool dup = false;
        for (auto& y : out)
            if (y == x) { dup = true; break; }
        if (!dup) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

OrthMap inverting_involution(const OrthMap& phi, FixDim want) {
    const QuadSpace& sp = phi.space();
    const unsigned n = sp.dim();
    if (n % 2) throw DomainError("prescribed fix dimensions need even dimension");
    TypeLabel lab = classify_summand(phi);  // DomainError when decomposable
    if (want == FixDim::HalfPlusOne) {
        bool qualifies = lab.unipotent &&
                         (lab.kind == TypeKind::Type1o || lab.kind == TypeKind::Type2);
        if (!qualifies)
            throw DomainError("fix dimension n/2+1 applies to unipotent type-1o/type-2 inputs");
    }
    const unsigned target = n / 2 + (want == FixDim::HalfPlusOne ? 1 : 0);
    for (const Mat& x : inverter_menu(sp, phi.mat(), lab))
        if (fix_dim_of(x) == target) return OrthMap(sp, x);
    throw WitnessNotFound("no inverting involution with the requested fix dimension");
}

// ---------------------------------------------------------------------------
// Involution pairs and the classifiers

namespace {

struct PartWitness {
    const Summand* part;
    std::vector<Mat> menu;  // canonical-ordered inverting involutions
    int pick = -1;          // chosen index into menu
};

} // namespace

std::optional<std::pair<OrthMap, OrthMap>> involution_pair_so(const OrthMap& phi) {
    const QuadSpace& sp = phi.space();
    const FiniteField& F = sp.field();
    const unsigned n = sp.dim();
    if (!phi.is_special()) throw DomainError("involution pairs live in the special subgroup");
    if (phi.is_involution())
        return std::make_pair(phi, OrthMap(sp, Mat::identity(F, n)));

    auto dec = ortho_indecomposable_summands(phi);
    std::vector<PartWitness> parts;
    for (auto& p : dec.parts)
        parts.push_back({&p, inverter_menu(p.form, p.map, p.label), -1});
    // default: canonical-first; then fix global parity of the path dimension
    unsigned parity = 0;
    for (auto& pw : parts) {
        if (pw.menu.empty()) return std::nullopt;
        pw.pick = 0;
        parity ^= (pw.part->form.dim() - fix_dim_of(pw.menu[0])) & 1;
    }
    if (parity) {
        bool flipped = false;
        for (auto& pw : parts) {
            unsigned have = (pw.part->form.dim() - fix_dim_of(pw.menu[pw.pick])) & 1;
            for (size_t i = 0; i < pw.menu.size(); ++i) {
                unsigned cand = (pw.part->form.dim() - fix_dim_of(pw.menu[i])) & 1;
                if (cand != have) {
                    pw.pick = static_cast<int>(i);
                    flipped = true;
                    break;
                }
            }
            if (flipped) break;
        }
        if (!flipped) return std::nullopt;
    }
    // assemble sigma = blockwise inverters in the stacked part basis
    std::vector<Vec> frame_rows;
    for (auto& pw : parts)
        for (unsigned i = 0; i < pw.part->space.dim(); ++i)
            frame_rows.push_back(pw.part->space.basis().row(i));
    Mat frame = Mat::from_rows(F, frame_rows);
    Mat blk(F, n, n);
    unsigned off = 0;
    for (auto& pw : parts) {
        const Mat& s = pw.menu[pw.pick];
        for (unsigned i = 0; i < s.rows(); ++i)
            for (unsigned j = 0; j < s.rows(); ++j)
                blk.set(off + i, off + j, s.at(i, j));
        off += s.rows();
    }
    Mat sigma_m = frame.inverse().value() * blk * frame;
    Mat rho_m = phi.mat() * sigma_m;
    OrthMap sigma(sp, sigma_m), rho(sp, rho_m);
    if (!sigma.is_involution() || !rho.is_involution())
        throw InternalError("assembled pair is not a pair of involutions");
    if (!(rho_m * sigma_m == phi.mat()))
        throw InternalError("assembled pair does not multiply to the input");
    if (!sigma.is_special() || !rho.is_special())
        throw InternalError("assembled pair left the special subgroup");
    return std::make_pair(rho, sigma);
}

WitnessReport is_bireflectional_so(const OrthMap& phi) {
    if (!phi.is_special())
        throw DomainError("bireflectionality classifier applies to special elements");
    const unsigned n = phi.dim();
    const bool char2 = phi.space().field().p() == 2;
    WitnessReport rep;
    if (n % 4 != 2) {
        rep.bireflectional = true;
        rep.reason = "dim-not-2-mod-4";
    } else {
        auto dec = ortho_indecomposable_summands(phi);
        bool found = false;
        if (char2) {
            for (auto& p : dec.parts) {
                if (p.label.kind == TypeKind::Type1o) {
                    found = true;
                    rep.reason = "type1o-summand";
                    break;
                }
                if (p.label.kind == TypeKind::Type2 && p.label.unipotent) {
                    found = true;
                    rep.reason = "cyclic-unipotent-summand";
                    break;
                }
            }
            if (!found) rep.reason = "no-type1o-or-cyclic-unipotent-summand";
        } else {
            for (auto& p : dec.parts)
                if (p.space.dim() % 2 == 1) {
                    found = true;
                    rep.reason = "odd-dimensional-summand";
                    break;
                }
            if (!found) rep.reason = "no-odd-dimensional-summand";
        }
        rep.bireflectional = found;
    }
    rep.reversible = rep.bireflectional;
    if (rep.bireflectional) {
        rep.pair = involution_pair_so(phi);
        if (!rep.pair)
            throw InternalError("classifier said bireflectional but no pair was assembled");
    }
    return rep;
}

bool is_reversible_so(const OrthMap& phi) {
    return is_bireflectional_so(phi).bireflectional;
}

bool is_group_bireflectional(const QuadSpace& sp) {
    const unsigned n = sp.dim();
    if (n % 4 != 2) return true;
    if (sp.field().p() == 2)
        return n == 2 && sp.field().q() == 2 && sp.is_hyperbolic_space();
    return sp.field().q() == 3 && sp.is_hyperbolic_space();
}

} // namespace soq
