#pragma once

#include <array>
#include <span>
#include <vector>

#include "bvx/dyadic.hpp"
#include "bvx/grid.hpp"
#include "bvx/jump_measure.hpp"

namespace bvx {

struct TraceResult {
    /// Finest-scale value per cell.
    GridFunction trace;
    /// increments[l][c] = |f(level l+1 ancestor) - f(level l ancestor)| of cell c.
    std::vector<GridFunction> increments;
};

/// Whitney-average trace of a Whitney-constant function.
[[nodiscard]] TraceResult trace_whitney(const WhitneyFunction& f);

struct ExtensionLayer {
    GridFunction residual;  // g_k
    WhitneyFunction f;      // f_k, including the localization constant
};

struct ExtensionResult {
    std::vector<ExtensionLayer> layers;
    WhitneyFunction total;
    /// ||g_k||_p for k = 0..K; the last entry is the final residual.
    std::vector<double> residual_norms;
    double eps = 0.0;
    /// Tolerance passed to the single-step approximant.
    double inner_eps = 0.0;
    double p = 2.0;
    int iterations = 0;
};

/// Single-step tolerance eps / (2 p') that forces ||g_{k+1}||_p <= eps ||g_k||_p:
/// the residual is bounded by the inner tolerance times M_D of the mean-zero
/// part, Doob's inequality costs p' and removing the mean costs 2.
[[nodiscard]] double contraction_inner_eps(double eps, double p);

/// Geometric-series extension: g_0 = g, f_k = approximant of g_k (plus its
/// mean), g_{k+1} = g_k - trace f_k. Stops early when a residual vanishes.
/// Throws ContractViolation if some step fails to contract by eps.
[[nodiscard]] ExtensionResult iterate_extension(const GridFunction& g, double eps, int iterations, double p = 2.0);

/// Smooth extension u(t,x) = integral of f(ts, x + ty) eta(s,y) ds dy with the
/// tensor bump eta(s,y) = c (1-(2s-3)^2)^2 prod (1-(2y_i/c1)^2)^2, supported in
/// s in (1,2), |y_i| < c1/2. f is extended by its finest values below the slab
/// and by 0 above t = 1 and outside the unit cube. Evaluation is exact up to
/// rounding: the bump's marginals have polynomial antiderivatives.
class MollifiedField {
public:
    explicit MollifiedField(WhitneyFunction f, double c1 = 1.0);

    [[nodiscard]] int dim() const { return f_.lattice().dim(); }
    [[nodiscard]] double value(double t, std::span<const double> x) const;
    /// (d_t u, d_x0 u, d_x1 u); unused components are zero.
    [[nodiscard]] std::array<double, 3> gradient(double t, std::span<const double> x) const;
    /// u(h/4, cell center) per cell, h the finest side.
    [[nodiscard]] GridFunction trace() const;
    /// Gauss quadrature of |grad u| over (h, l(Q)] x Q, h = 2^{-J}.
    [[nodiscard]] double gradient_mass(const DyadicCube& q) const;
    /// Closed-box mass of grad f over the region that grad u on the box of Q
    /// reads from: t <= 2 l(Q), x within c1 l(Q) / 2 of Q, plus the outer
    /// terms that region reaches.
    [[nodiscard]] double enlarged_jump_mass(const DyadicCube& q) const;

    [[nodiscard]] const WhitneyFunction& source() const { return f_; }

private:
    template <bool Gradient>
    void accumulate(double t, std::span<const double> x, double& value, std::array<double, 3>& grad) const;

    WhitneyFunction f_;
    JumpMeasure jumps_;
    double c1_;
};

/// Bump normalization pieces, exposed for tests: s-density and y-density,
/// each integrating to 1 on its own.
[[nodiscard]] double bump_s_density(double s);
[[nodiscard]] double bump_y_density(double y, double c1);

}  // namespace bvx
