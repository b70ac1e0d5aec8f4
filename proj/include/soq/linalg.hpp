#pragma once

/**
 * @file linalg.hpp
 * @brief Exact matrix algebra over a FiniteField: kernels and images,
 *        minimal polynomials, path/fix towers, Fitting and primary
 *        decompositions, cyclic vectors, module similarity, and the
 *        multiplicative Jordan-Chevalley decomposition.
 *
 * Convention: vectors are rows and maps act on the right, v |-> v*M.
 * Image of M is its row space; kernel of M is the left null space.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soq/field.hpp"

namespace soq {

using Vec = std::vector<Fe>;

bool vec_is_zero(const Vec& v);
Vec vec_add(const FiniteField& F, const Vec& a, const Vec& b);
Vec vec_sub(const FiniteField& F, const Vec& a, const Vec& b);
Vec vec_scaled(const FiniteField& F, const Vec& a, Fe s);
/// Canonical total order on vectors: index = sum_i enc(v_i) q^i.
std::uint64_t vec_index(const FiniteField& F, const Vec& v);
Vec vec_from_index(const FiniteField& F, unsigned n, std::uint64_t idx);

/// Dense matrix over a FiniteField. Immutable value semantics except for
/// the explicit set() used while building.
class Mat {
public:
    Mat(FiniteField f, unsigned rows, unsigned cols);
    static Mat identity(const FiniteField& f, unsigned n);
    static Mat from_rows(const FiniteField& f, const std::vector<Vec>& rows);
    /// Companion matrix of a monic polynomial under the row-action
    /// convention: e_i M = e_{i+1}, last row carries the coefficients.
    static Mat companion(const Poly& f);

    unsigned rows() const { return rows_; }
    unsigned cols() const { return cols_; }
    const FiniteField& field() const { return F_; }

    Fe at(unsigned i, unsigned j) const { return a_[i * cols_ + j]; }
    void set(unsigned i, unsigned j, Fe v) { a_[i * cols_ + j] = v; }
    Vec row(unsigned i) const;
    const std::vector<Fe>& data() const { return a_; }

    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const Mat& o) const;
    Mat scaled(Fe s) const;
    Mat transpose() const;
    Mat pow(std::uint64_t e) const;
    Vec apply(const Vec& v) const;  // v * M

    std::optional<Mat> inverse() const;
    unsigned rank() const;
    bool is_zero() const;
    bool is_identity() const;

    bool operator==(const Mat& o) const;
    bool operator!=(const Mat& o) const { return !(*this == o); }
    /// Row-major digit order; the canonical tie-breaker for witnesses.
    bool operator<(const Mat& o) const;

    std::string str() const;

private:
    unsigned rows_, cols_;
    FiniteField F_;
    std::vector<Fe> a_;
};

/// Subspace of F^n carried by its unique reduced-echelon basis, so equality
/// of subspaces is structural equality.
class Subspace {
public:
    static Subspace zero(const FiniteField& f, unsigned ambient);
    static Subspace full(const FiniteField& f, unsigned ambient);
    static Subspace span(const FiniteField& f, unsigned ambient,
                         const std::vector<Vec>& gens);
    static Subspace row_space(const Mat& m);

    unsigned dim() const { return basis_.rows(); }
    unsigned ambient() const { return basis_.cols(); }
    const FiniteField& field() const { return basis_.field(); }
    const Mat& basis() const { return basis_; }

    bool contains(const Vec& v) const;
    bool contains(const Subspace& s) const;
    /// Residue of v after reduction against the echelon basis.
    Vec reduce(Vec v) const;
    /// Coordinates of v w.r.t. the basis, if v lies in the subspace.
    std::optional<Vec> coords(const Vec& v) const;

    Subspace sum(const Subspace& o) const;
    Subspace intersect(const Subspace& o) const;
    bool is_invariant(const Mat& m) const;

    /// Vector with the given coordinate tuple index (canonical enumeration
    /// of the subspace's q^dim elements).
    Vec element(std::uint64_t idx) const;

    bool operator==(const Subspace& o) const { return basis_ == o.basis_; }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

private:
    explicit Subspace(Mat rref_basis) : basis_(std::move(rref_basis)) {}
    Mat basis_;
};

/// Reduced row echelon form; returns pivot column indices.
std::vector<unsigned> rref_in_place(Mat& m);

Subspace image(const Mat& m);   // row space of v |-> vM
Subspace kernel(const Mat& m);  // {v : vM = 0}

/// One solution x of x*A = rhs (free variables zero), or nullopt.
std::optional<Vec> solve_left(const Mat& a, const Vec& rhs);

Mat eval_at(const Poly& p, const Mat& m);

Poly min_poly(const Mat& m);
Poly local_min_poly(const Mat& m, const Vec& v);

/// (image, kernel) of (M - 1)^j.
std::pair<Subspace, Subspace> path_fix(const Mat& m, unsigned j);
/// Stable split (path^inf, fix^inf) = (image, kernel) of (M - 1)^n.
std::pair<Subspace, Subspace> fitting_split(const Mat& m);

/// M-invariant primary components keyed by the irreducible factors of the
/// minimal polynomial, in canonical factor order.
std::vector<std::pair<Poly, Subspace>> primary_decomposition(const Mat& m);

Subspace cyclic_space(const Mat& m, const Vec& v);

/// Vector whose local minimal polynomial equals min_poly(m), found by the
/// deterministic order-combination construction.
Vec max_order_vector(const Mat& m);

/// Generator of S as a cyclic module over the restriction, or nullopt when
/// the restriction is not cyclic. DomainError if S is not invariant.
std::optional<Vec> cyclic_vector(const Mat& m, const Subspace& s);

/// Matrix of the restriction of m to the invariant subspace s, written in
/// the coordinates of s's echelon basis. DomainError if not invariant.
Mat restriction(const Mat& m, const Subspace& s);

/// Multiplicative Jordan-Chevalley decomposition (S, U): M = S*U = U*S with
/// S semisimple, U unipotent, both polynomials in M. DomainError if M is
/// singular.
std::pair<Mat, Mat> jordan_chevalley(const Mat& m);

/// Cyclic decomposition: generators with their local minimal polynomials,
/// forming the invariant-factor divisibility chain mu_1, mu_2 | mu_1, ...
std::vector<std::pair<Vec, Poly>> cyclic_decomposition(const Mat& m);

std::vector<Poly> invariant_factors(const Mat& m);

/// Elementary divisors as (irreducible, exponent) pairs with repetitions,
/// computed from kernel-dimension sequences, sorted canonically.
std::vector<std::pair<Poly, unsigned>> elementary_divisors(const Mat& m);

/// Invertible C with C^{-1} A C = B, or nullopt when A and B are not
/// similar (decided by invariant factors). DomainError on size mismatch.
std::optional<Mat> module_similar(const Mat& a, const Mat& b);

} // namespace soq
