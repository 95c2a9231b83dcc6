#pragma once

#include <cstddef>
#include <vector>

namespace bvx {

/// Gauss-Legendre rule on [-1, 1] with all nodes listed (not just the
/// non-negative half).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Supported orders: 2, 3, 4, 6, 8, 16.
[[nodiscard]] const GaussRule& gauss_rule(int order);

/// Integrate a callable over [a, b] with the given rule.
template <class F>
double integrate(const GaussRule& rule, double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

}  // namespace bvx
