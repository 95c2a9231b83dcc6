#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bvx/dyadic.hpp"

namespace bvx {

/// A set of lattice cubes with stopping-parent pointers, stored in insertion
/// order. Parent pointers and owners stay consistent under any insertion order.
class StoppingFamily {
public:
    static constexpr std::ptrdiff_t none = -1;

    explicit StoppingFamily(Lattice lattice);

    [[nodiscard]] const Lattice& lattice() const { return lattice_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    /// Flat lattice index of member i.
    [[nodiscard]] std::size_t cube_index(std::size_t i) const { return members_[i]; }
    [[nodiscard]] DyadicCube cube(std::size_t i) const { return lattice_.cube(members_[i]); }
    [[nodiscard]] std::span<const std::size_t> cube_indices() const { return members_; }
    /// Depth in the stopping tree; initial members that have no strict member
    /// ancestor sit at 0.
    [[nodiscard]] int generation(std::size_t i) const;
    /// Position of the minimal member strictly containing member i, or i itself
    /// when there is none (the top-cube convention).
    [[nodiscard]] std::size_t parent(std::size_t i) const { return parent_[i]; }
    /// Member position of a lattice cube, or `none`.
    [[nodiscard]] std::ptrdiff_t slot(std::size_t cube) const { return slot_[cube]; }
    [[nodiscard]] bool contains(std::size_t cube) const { return slot_[cube] != none; }
    /// Minimal member containing the cube (inclusive), or `none`.
    [[nodiscard]] std::ptrdiff_t owner(std::size_t cube) const { return owner_[cube]; }
    /// Minimal member strictly containing the cube, or `none`.
    [[nodiscard]] std::ptrdiff_t strict_owner(std::size_t cube) const;
    /// Members whose stopping parent is member i (excluding i itself).
    [[nodiscard]] std::vector<std::size_t> children_of(std::size_t i) const;
    [[nodiscard]] int max_generation() const;

    /// Insert a cube; its parent is the current minimal strict member ancestor
    /// and members directly below it are re-parented to it. Returns the member
    /// position; inserting an existing member is a no-op.
    std::size_t insert(std::size_t cube);

private:
    void refresh_owners(std::size_t cube, std::size_t position);

    Lattice lattice_;
    std::vector<std::size_t> members_;
    std::vector<std::size_t> parent_;
    std::vector<std::ptrdiff_t> slot_;
    std::vector<std::ptrdiff_t> owner_;
};

/// Stopping criterion C(candidate, F): candidate is a strict lattice
/// descendant of member F with no member in between.
using StopRule = std::function<bool(std::size_t candidate, std::size_t member)>;

/// Stopping family with initial collection `initial` (flat indices): every
/// member F is scanned top-down and a descendant Q stops the scan along its
/// branch when it is already a member or when C(Q, F) holds, in which case Q
/// becomes a member with stopping parent F.
[[nodiscard]] StoppingFamily build_family(const Lattice& lattice, std::span<const std::size_t> initial,
                                          const StopRule& rule);

/// Slow reference: visits every cube in generation order and applies the
/// definition against its minimal strict member ancestor.
[[nodiscard]] StoppingFamily build_family_reference(const Lattice& lattice, std::span<const std::size_t> initial,
                                                    const StopRule& rule);

/// Same member sets (parents are then determined).
[[nodiscard]] bool same_members(const StoppingFamily& a, const StoppingFamily& b);

/// sup over lattice cubes Q of |Q|^{-1} sum of |S| over members S inside Q;
/// one bottom-up pass.
[[nodiscard]] double carleson_packing(const StoppingFamily& family);
/// O(|lattice| * |members|) double loop used as a test oracle.
[[nodiscard]] double carleson_packing_direct(const StoppingFamily& family);

}  // namespace bvx
