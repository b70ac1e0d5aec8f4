#pragma once

/**
 * @file witness.hpp
 * @brief Constructive certificates: synchronized paired bases for
 *        indecomposable type-1o transformations, orthogonal square roots,
 *        inverting involutions with prescribed fix dimensions, involution
 *        pairs inside the special orthogonal group, and the
 *        bireflectionality / reversibility classifiers.
 */

#include <optional>
#include <string>

#include "soq/structure.hpp"

namespace soq {

/// Basis pair for an indecomposable type-1o transformation phi on a
/// 2m-dimensional space: V = <x>_phi + <z>_phi (direct), with
///   f(x, x phi^k) = f(z, z phi^k) for all k,
///   f(x phi^k, z) = f(x, z phi^(k+1)) for all k,
///   Q(x) = Q(z).
/// The cross-pairing index is the one the square-root construction needs:
/// pairs extracted from an actual orthogonal root satisfy exactly this
/// symmetry, and with it the shift-register root below is orthogonal.
struct PairedBasis {
    Vec x, z;
    unsigned m;
};

/// Builds the paired basis by recursion over path/fix quotients.
/// Characteristic 2, indecomposable type 1o only (DomainError otherwise).
PairedBasis paired_basis_type1o(const OrthMap& phi);

/// Orthogonal square root of an indecomposable type-1 transformation:
/// succeeds exactly on type 1o (the root is cyclic, unipotent, and lies
/// outside the special subgroup); NoSquareRoot on type 1e.
OrthMap square_root_type1o(const OrthMap& phi);

enum class FixDim { Half, HalfPlusOne };

/// Involution sigma with sigma phi sigma = phi^{-1} and the requested fix
/// dimension (n/2, or n/2 + 1 for unipotent type-1o/type-2 inputs).
/// DomainError for decomposable or out-of-contract inputs; WitnessNotFound
/// when no involution with the requested fix dimension exists.
OrthMap inverting_involution(const OrthMap& phi, FixDim want);

/// All involutions of the reversing intertwiner space of a (matrix of an)
/// orthogonal transformation, in canonical enumeration order.
std::vector<Mat> reversing_involutions(const QuadSpace& sp, const Mat& a,
                                       unsigned cap_bits = 20);

/// Special involutions rho, sigma with rho * sigma = phi, when phi is
/// bireflectional in the special orthogonal group; nullopt otherwise.
/// DomainError if phi is not special.
std::optional<std::pair<OrthMap, OrthMap>> involution_pair_so(const OrthMap& phi);

struct WitnessReport {
    bool bireflectional = false;
    bool reversible = false;
    std::optional<std::pair<OrthMap, OrthMap>> pair;
    std::string reason;  // machine-readable tag naming the criterion used
};

/// Classifier for bireflectionality of a special element, with certificate.
WitnessReport is_bireflectional_so(const OrthMap& phi);

/// Reversibility within the special orthogonal group (conjugate to the
/// inverse by a special element); coincides with bireflectionality.
bool is_reversible_so(const OrthMap& phi);

/// Whether every element of the special orthogonal group of this space is
/// bireflectional.
bool is_group_bireflectional(const QuadSpace& sp);

} // namespace soq
