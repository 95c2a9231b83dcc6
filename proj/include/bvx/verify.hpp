#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvx/grid.hpp"

namespace bvx {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
};

/// Fast structural checks on one input: each compares a measured quantity
/// with its bound, or a fast path with its slow reference. Exact
/// inequalities use zero tolerance, floating identities a relative 1e-10.
[[nodiscard]] std::vector<CheckResult> verify_suite(const GridFunction& g, double eps, double p, std::uint64_t seed);

}  // namespace bvx
