#pragma once

/**
 * @file quadspace.hpp
 * @brief Nondefective quadratic spaces over GF(p^k): evaluation, radicals,
 *        total isotropy, Witt decomposition, Arf invariant, and forms
 *        induced on subquotients.
 *
 * A form is stored as an upper-triangular Gram matrix U with
 * Q(v) = v U v^T; the associated bilinear form is B = U + U^T with
 * f(u,w) = u B w^T. The diagonal of U carries the quadratic data that B
 * loses in characteristic 2.
 */

#include <optional>
#include <utility>
#include <vector>

#include "soq/linalg.hpp"

namespace soq {

struct WittDecomposition {
    /// Hyperbolic pairs (e_i, f_i): Q(e_i) = Q(f_i) = 0, f(e_i, f_i) = 1,
    /// distinct pairs mutually orthogonal.
    std::vector<std::pair<Vec, Vec>> pairs;
    /// Anisotropic orthogonal complement of the pairs.
    Subspace kernel;
};

struct QuadQuotient;

class QuadSpace {
public:
    /// Validates: gram upper-triangular over the field, B = U + U^T
    /// nonsingular (nondefective). In characteristic 2 this forces even
    /// dimension.
    QuadSpace(FiniteField f, Mat gram_upper);

    /// Standard hyperbolic space of dimension 2m in block coordinates:
    /// Q(x_1..x_m, y_1..y_m) = sum x_i y_i.
    static QuadSpace hyperbolic(const FiniteField& f, unsigned m);
    /// Canonical anisotropic plane.
    static QuadSpace anisotropic_plane(const FiniteField& f);
    /// Dimension-2m space of Witt index m-1: hyperbolic + anisotropic plane.
    static QuadSpace minus_type(const FiniteField& f, unsigned m);
    /// Orthogonal (block-diagonal) sum.
    static QuadSpace orthogonal_sum(const QuadSpace& a, const QuadSpace& b);

    const FiniteField& field() const { return F_; }
    unsigned dim() const { return n_; }
    const Mat& gram_upper() const { return gram_; }
    const Mat& bilinear() const { return bil_; }

    Fe eval_q(const Vec& v) const;
    Fe eval_f(const Vec& u, const Vec& w) const;

    Subspace orthogonal_complement(const Subspace& w) const;
    /// rad W = W intersect W-perp.
    Subspace radical(const Subspace& w) const;
    bool is_totally_isotropic(const Subspace& w) const;
    bool is_totally_degenerate(const Subspace& w) const;
    bool is_nondefective_subspace(const Subspace& w) const;

    /// Deterministic Witt decomposition; isotropic vectors are found in
    /// canonical enumeration order.
    WittDecomposition witt_decompose() const;
    unsigned witt_index() const;
    bool is_hyperbolic_space() const { return 2 * witt_index() == n_; }

    /// Absolute-trace Arf invariant in {0,1}; characteristic 2 only
    /// (DomainError otherwise).
    unsigned arf_invariant() const;

    /// Form induced on W / rad W; DomainError if rad W is not totally
    /// isotropic.
    QuadQuotient quotient_form(const Subspace& w) const;
    /// Restriction to a nondefective subspace (radical must be zero).
    QuadQuotient restrict_to(const Subspace& w) const;

    bool operator==(const QuadSpace& o) const {
        return F_ == o.F_ && gram_ == o.gram_;
    }
    bool operator!=(const QuadSpace& o) const { return !(*this == o); }

private:
    FiniteField F_;
    unsigned n_;
    Mat gram_, bil_;
};

/// A form induced on a subquotient W / rad W, with the transversal mapping
/// its coordinates back to ambient representatives.
struct QuadQuotient {
    QuadSpace space;
    Mat transversal;  // rows: ambient representatives of the quotient basis
    Subspace radical;
};

} // namespace soq
