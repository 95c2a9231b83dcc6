#pragma once

#include <functional>

#include "bvx/dyadic.hpp"
#include "bvx/elliptic/solution.hpp"

namespace bvx::elliptic {

struct ProbeSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ProbeOptions {
    double theta = 1.0 - 2.0 / 16.0;  // the trace is taken over theta Q
    double eta = 0.025;               // corkscrew height (1 - eta) l
    int x_panels = 32;
    int t_panels = 16;                // geometric, accumulating at the graph
};

using Graph = std::function<double(double)>;

/// lhs = int_{theta Q} |u(graph(x), x) - u(p_Q)|^2 dx,
/// rhs = int int over {x in Q, graph(x) < t < l(Q)} |grad u|^2 (t - graph(x)).
/// Requires a harmonic (Poisson) field and n = 1; throws ConfigError.
[[nodiscard]] ProbeSides ns_probe(const SolutionField& u, const Graph& graph, const DyadicCube& q,
                                  const ProbeOptions& options = {});

/// lhs = |Q|^{-1} times the rhs of ns_probe, rhs = sup of |u|^2 above the
/// graph within the Carleson box, over a sample lattice.
[[nodiscard]] ProbeSides sn_probe(const SolutionField& u, const Graph& graph, const DyadicCube& q,
                                  const ProbeOptions& options = {});

}  // namespace bvx::elliptic
