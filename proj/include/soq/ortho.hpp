#pragma once

/**
 * @file ortho.hpp
 * @brief Orthogonal transformations of a QuadSpace: certified membership,
 *        the even-path-dimension criterion for the special subgroup,
 *        reflections and reflection factorizations, and fixed-point-free
 *        full-path elements.
 */

#include <optional>
#include <vector>

#include "soq/quadspace.hpp"

namespace soq {

/// Exact membership test: Q(vM) = Q(v) for all v, decided by the Gram
/// identity (equal diagonals of M U M^T and U, and M B M^T = B).
bool is_orthogonal(const QuadSpace& sp, const Mat& m);

/// An orthogonal transformation. Construction always verifies orthogonality
/// and precomputes the minimal polynomial and path dimension; instances are
/// immutable afterwards.
class OrthMap {
public:
    OrthMap(QuadSpace sp, Mat m);

    const QuadSpace& space() const { return sp_; }
    const Mat& mat() const { return m_; }
    const Poly& min_poly() const { return minpoly_; }
    unsigned dim() const { return sp_.dim(); }

    /// dim of the path (residual) space, the image of phi - 1.
    unsigned path_dim() const { return path_dim_; }
    /// Membership in the special orthogonal group: even path dimension.
    bool is_special() const { return path_dim_ % 2 == 0; }

    Vec apply(const Vec& v) const { return m_.apply(v); }
    OrthMap operator*(const OrthMap& o) const;
    OrthMap inverse() const;
    bool is_involution() const;
    bool is_identity() const { return m_.is_identity(); }
    bool is_unipotent() const;

    Subspace path_space() const { return path_fix(m_, 1).first; }
    Subspace fix_space() const { return path_fix(m_, 1).second; }

    bool operator==(const OrthMap& o) const {
        return sp_ == o.sp_ && m_ == o.m_;
    }

private:
    QuadSpace sp_;
    Mat m_;
    Poly minpoly_;
    unsigned path_dim_;
};

/// Reflection along an anisotropic vector b:
/// v -> v - (f(v,b)/Q(b)) b. DomainError for isotropic b.
OrthMap reflection(const QuadSpace& sp, const Vec& b);

/// Greedy Cartan-Dieudonne-Scherk factorization: returns vectors b_1..b_t
/// with phi = refl(b_1) * ... * refl(b_t) and t <= path_dim + 2. When the
/// path space is totally isotropic the word is extended by an auxiliary
/// reflection and the descent retried.
std::vector<Vec> reflection_factorization(const OrthMap& phi);

/// Fixed-point-free product of reflections along an anisotropic basis, so
/// the path space is all of V. DomainError when no anisotropic basis exists
/// (exactly the hyperbolic plane over GF(2)).
OrthMap full_path_element(const QuadSpace& sp);

} // namespace soq
