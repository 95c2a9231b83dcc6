#pragma once

// Three stopping children of the unit cube at delta = 1/16 (skip 4, depth 8):
// a large child, a small child touching it (so covered by it), and a small
// child far enough away to stay uncovered.

#include <array>

#include "bvx/dyadic.hpp"

namespace oracle {

struct CoverConfig {
    static constexpr int depth = 8;
    static constexpr int skip = 4;
    bvx::DyadicCube top = bvx::DyadicCube::unit(1);
    bvx::DyadicCube small_covered{1, 8, {112, 0}};  // [112/256, 113/256)
    bvx::DyadicCube large{1, 4, {6, 0}};            // [96/256, 112/256)
    bvx::DyadicCube small_free{1, 8, {150, 0}};     // [150/256, 151/256)

    [[nodiscard]] std::array<bvx::DyadicCube, 3> children() const { return {small_covered, large, small_free}; }
};

}  // namespace oracle
