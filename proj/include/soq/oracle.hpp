#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force ground truth: exact enumeration of small orthogonal and
 *        special orthogonal groups, involution lists, conjugacy classes,
 *        centralizers, square-root tables, and the exhaustive verification
 *        battery for every classifier in the library.
 */

#include <cstdint>
#include <string>

#include "soq/witness.hpp"

namespace soq {

enum class GroupKind { Orthogonal, Special };

/// Exact element table of O(V,Q) or SO(V,Q), canonically ordered (row-major
/// digit order). Built by breadth-first closure from reflections, extended
/// by isotropic-transvection generators when reflections fall short.
/// Read-only after construction; sharing across threads is safe.
class GroupTable {
public:
    GroupTable(QuadSpace sp, GroupKind kind, std::uint64_t budget = 10'000'000);

    const QuadSpace& space() const { return sp_; }
    GroupKind kind() const { return kind_; }
    std::size_t order() const { return elems_.size(); }
    const Mat& element(std::uint32_t i) const { return elems_[i]; }
    const std::vector<Mat>& elements() const { return elems_; }

    /// Index of a matrix in canonical order; DomainError if not a member.
    std::uint32_t index_of(const Mat& m) const;
    bool contains(const Mat& m) const;

    std::uint32_t product(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inverse(std::uint32_t a) const;

    const std::vector<std::uint32_t>& involutions() const { return involutions_; }
    bool is_special(std::uint32_t i) const { return special_[i]; }

    /// Conjugacy class id per element (classes computed lazily, by orbit
    /// expansion under conjugation by the generators).
    std::uint32_t class_of(std::uint32_t i) const;
    std::uint32_t class_count() const;
    /// Smallest element index in the class of i (the class representative).
    std::uint32_t class_rep(std::uint32_t i) const;
    /// A group element g with rep * g = g * element(i) (that is,
    /// g^{-1} rep g = element(i)).
    Mat conjugator_from_rep(std::uint32_t i) const;

    /// Order of the same group from the classical closed formula, computed
    /// independently of the closure.
    static std::uint64_t order_formula(const QuadSpace& sp, GroupKind kind);

private:
    QuadSpace sp_;
    GroupKind kind_;
    std::vector<Mat> elems_;
    std::vector<bool> special_;
    std::vector<std::uint32_t> involutions_;
    std::vector<Mat> generators_;
    // lazy conjugacy data
    mutable std::vector<std::uint32_t> class_id_;
    mutable std::vector<std::uint32_t> class_parent_;  // BFS tree: parent index
    mutable std::vector<std::int32_t> class_gen_;      // generator used, -1 at root
    mutable std::uint32_t class_count_ = 0;
    void ensure_classes() const;
};

/// First involution pair (canonical order) whose product is phi, or nullopt.
std::optional<std::pair<std::uint32_t, std::uint32_t>> brute_bireflectional(
    const OrthMap& phi, const GroupTable& g);

/// First group element conjugating phi to its inverse, or nullopt.
std::optional<std::uint32_t> brute_reversible(const OrthMap& phi, const GroupTable& g);

/// All elements commuting with phi.
std::vector<std::uint32_t> brute_centralizer(const OrthMap& phi, const GroupTable& g);

/// All square roots of phi within the table.
std::vector<std::uint32_t> brute_square_roots(const OrthMap& phi, const GroupTable& g);

struct ClaimResult {
    std::string claim_id;
    std::string statement;
    std::uint64_t instances = 0;
    std::vector<std::string> failures;  // serialized minimal counterexamples
    bool passed() const { return failures.empty(); }
};

struct VerifyReport {
    std::vector<ClaimResult> claims;
    bool all_passed() const {
        for (auto& c : claims)
            if (!c.passed()) return false;
        return true;
    }
};

/// Runs the full claim battery over one space: exhaustive checks of every
/// classifier and invariant against the enumerated groups.
VerifyReport verify_theorems(const QuadSpace& sp, std::uint64_t budget = 10'000'000);

} // namespace soq
