#pragma once

/**
 * @file structure.hpp
 * @brief Decomposition of an orthogonal transformation into orthogonally
 *        indecomposable orthogonal summands, the type trichotomy
 *        (bicyclic unipotent-pair / module-indecomposable / cyclic
 *        biprimary), hyperbolicity of transformations, and the fixture
 *        families used throughout the test and verification suites.
 */

#include <cstdint>
#include <functional>
#include <optional>

#include "soq/ortho.hpp"

namespace soq {

enum class TypeKind { Type1o, Type1e, Type2, Type3 };

const char* type_kind_name(TypeKind k);

struct TypeLabel {
    TypeKind kind;
    std::vector<std::pair<Poly, unsigned>> eldivs;  // elementary divisors
    bool unipotent;
};

/// One orthogonally indecomposable orthogonal summand.
struct Summand {
    Subspace space;       // nondefective invariant subspace of the ambient
    QuadSpace form;       // restricted quadratic space (basis coordinates)
    Mat map;              // restricted matrix (basis coordinates)
    TypeLabel label;
    bool certified;       // exhaustive invariant-subspace certificate ran
};

struct SummandDecomposition {
    std::vector<Summand> parts;
    bool all_certified() const {
        for (auto& p : parts)
            if (!p.certified) return false;
        return true;
    }
};

/// Number of subspaces of F_q^n (saturating at 2^63).
std::uint64_t subspace_count(unsigned q, unsigned n);

/// Enumerates the reduced-echelon bases of all dimension-d subspaces of
/// F_q^n in canonical order; stops early when fn returns true.
void for_each_subspace(const FiniteField& f, unsigned n, unsigned d,
                       const std::function<bool(const Mat&)>& fn);

/// First proper nondefective invariant subspace in canonical order
/// (dimension ascending), or nullopt if none exists. Exhaustive; the caller
/// is responsible for size feasibility.
std::optional<Subspace> minimal_nondefective_invariant(const QuadSpace& sp,
                                                       const Mat& m);

/// Splits into pairwise-orthogonal nondefective invariant summands, each
/// orthogonally indecomposable. Deterministic. Parts on spaces small enough
/// for exhaustive search carry a certificate; larger parts are flagged.
SummandDecomposition ortho_indecomposable_summands(const OrthMap& phi);

/// Type of an orthogonally indecomposable transformation. DomainError if
/// the input is decomposable.
TypeLabel classify_summand(const OrthMap& phi);

bool is_ortho_indecomposable(const OrthMap& phi);

/// Invariant totally isotropic complementary pair (U, W), or nullopt when
/// the transformation is not hyperbolic. Constructive for indecomposable
/// type-1 inputs in characteristic 2; exhaustive search otherwise (ambient
/// dimension <= 8).
std::optional<std::pair<Subspace, Subspace>> is_hyperbolic_transform(const OrthMap& phi);

/// Type-1 fixture families (characteristic 2).
///  - hyperbolic = false: the square of a cyclic unipotent on the
///    dimension-(4m+2), Witt-index-2m space; orthogonally indecomposable of
///    type 1o and not hyperbolic. m = 0 gives the identity on the
///    anisotropic plane.
///  - hyperbolic = true: a bicyclic unipotent with both elementary divisors
///    (x+1)^(2m) on the hyperbolic space of dimension 4m; type 1e.
OrthMap make_type1_fixture(const FiniteField& f, unsigned m, bool hyperbolic);

/// Cyclic unipotent orthogonal transformation with minimal polynomial
/// (x+1)^(2m) on a 2m-dimensional nondefective space; the seed selects among
/// the invariant quadratic forms of the regular unipotent (characteristic 2).
OrthMap make_cyclic_unipotent(const FiniteField& f, unsigned m,
                              std::uint64_t seed = 0);

/// For an indecomposable type-1e transformation phi: a cyclic eta in the
/// same orthogonal group whose unipotent Jordan-Chevalley factor is exactly
/// phi. DomainError for other inputs.
OrthMap cyclic_cover_type1e(const OrthMap& phi);

/// Conjugator alpha in the orthogonal group with alpha^{-1} phi alpha = psi,
/// for two indecomposable type-1e transformations of the same space.
Mat conjugate_type1e(const OrthMap& phi, const OrthMap& psi);

} // namespace soq
