#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bvx/elliptic/coefficients.hpp"
#include "bvx/grid.hpp"
#include "bvx/kernels.hpp"

namespace bvx::elliptic {

/// A solution u on the upper half-space with boundary data on the unit cube.
/// Points are (t, x) with t > 0; gradients are returned as (d_t, d_x0, d_x1),
/// the last entry zero for n = 1.
class SolutionField {
public:
    virtual ~SolutionField() = default;
    [[nodiscard]] virtual int dim() const = 0;
    [[nodiscard]] virtual double value(double t, std::span<const double> x) const = 0;
    [[nodiscard]] virtual std::array<double, 3> gradient(double t, std::span<const double> x) const = 0;
    [[nodiscard]] virtual std::string_view backend() const = 0;
    /// Holder exponent of interior solutions, used to derive the corkscrew
    /// parameter; 1 for harmonic functions.
    [[nodiscard]] virtual double holder_exponent() const { return 1.0; }

    /// n = 1 convenience overloads.
    [[nodiscard]] double value(double t, double x) const { return value(t, std::span<const double>(&x, 1)); }
    [[nodiscard]] std::array<double, 3> gradient(double t, double x) const {
        return gradient(t, std::span<const double>(&x, 1));
    }
};

/// Poisson extension of the 1-periodic extension of g (unit-cube torus), so
/// constants are reproduced exactly and u(t, .) tends to the mean of g.
///
/// n = 1: the three images nearest to the point are integrated by Gauss
/// quadrature per boundary cell through the SIMD kernels, with graded panels
/// on nearby cells once t is below two cells; the remaining images are summed
/// as a power series in the complex point built from the moments of g. For
/// t > 1 a truncated Fourier series is used. The gradient is exact up to the
/// same series truncation.
///
/// n = 2: the mean of g plus the direct images |m|_inf <= image_radius of the
/// mean-free part; the neglected images are dipole-cancelled.
class PoissonField final : public SolutionField {
public:
    explicit PoissonField(const GridFunction& g, const kernels::Table& table = kernels::active(), int image_radius = 8);

    [[nodiscard]] int dim() const override { return n_; }
    using SolutionField::gradient;
    using SolutionField::value;
    [[nodiscard]] double value(double t, std::span<const double> x) const override;
    [[nodiscard]] std::array<double, 3> gradient(double t, std::span<const double> x) const override;
    [[nodiscard]] std::string_view backend() const override { return "poisson"; }

private:
    // Zero-extension integrals of the stored cell data.
    [[nodiscard]] double direct_1d(double t, double x) const;
    [[nodiscard]] double direct_2d(double t, double x0, double x1) const;
    [[nodiscard]] std::array<double, 3> direct_gradient_2d(double t, double x0, double x1) const;
    [[nodiscard]] double value_1d(double t, double x) const;
    [[nodiscard]] std::array<double, 3> gradient_1d(double t, double x) const;

    const kernels::Table* table_;
    int n_;
    int depth_;
    int image_radius_;
    double mean_;
    // n = 1: g itself; n = 2: g minus its mean.
    std::vector<double> g_;
    // Far-field nodes, `per_cell` consecutive entries per boundary cell.
    std::size_t per_cell_;
    std::vector<double> y0_;
    std::vector<double> y1_;
    std::vector<double> w_;
    // n = 1: edges k h, k = 0..N, and the jumps g_k - g_{k-1}, g zero outside.
    std::vector<double> edges_;
    std::vector<double> jumps_;
    // n = 1: power series in a = x - 1/2 - i t of the images |m| >= 2, and
    // Fourier coefficients for large t.
    std::vector<double> far_series_;
    std::vector<std::complex<double>> fourier_;
};

[[nodiscard]] std::unique_ptr<SolutionField> solve_poisson(const GridFunction& g);

struct FdReport {
    std::size_t nodes = 0;
    double residual = 0.0;          // ||K u - b|| / ||b|| on free nodes
    double energy = 0.0;            // integral of A grad u . grad u
    double dirichlet_energy = 0.0;  // integral of |grad u|^2
    double boundary_pairing = 0.0;  // sum over Dirichlet nodes of u (K u)
    double lambda = 0.0;
};

/// Bilinear finite elements for div(A grad u) = 0 on [0,1] x [0,1] in (t, x),
/// n = 1, mesh width 2^{-J-1}. Dirichlet data: g at t = 0 (nodes on a cell
/// boundary take the mean of the two adjacent cells), the mean of g at t = 1;
/// natural (co-normal) conditions on the sides. Solved with a sparse LU.
class FdSolution final : public SolutionField {
public:
    FdSolution(const GridFunction& g, const EllipticCoefficients& a);

    [[nodiscard]] int dim() const override { return 1; }
    using SolutionField::gradient;
    using SolutionField::value;
    /// Bilinear interpolation; the point is clamped into the closed square.
    [[nodiscard]] double value(double t, std::span<const double> x) const override;
    /// Gradient of the bilinear element containing the point.
    [[nodiscard]] std::array<double, 3> gradient(double t, std::span<const double> x) const override;
    [[nodiscard]] std::string_view backend() const override { return "fd"; }
    /// Conservative exponent for rough coefficients.
    [[nodiscard]] double holder_exponent() const override { return 0.5; }

    [[nodiscard]] const FdReport& report() const { return report_; }
    [[nodiscard]] std::size_t nodes_per_side() const { return m_ + 1; }
    [[nodiscard]] double node_value(std::size_t it, std::size_t ix) const { return u_[it * (m_ + 1) + ix]; }
    [[nodiscard]] double mesh_width() const { return h_; }

private:
    std::size_t m_;
    double h_;
    std::vector<double> u_;
    FdReport report_;
};

/// Nodal boundary data used by the solver at t = 0 (m + 1 nodes).
[[nodiscard]] std::vector<double> fd_bottom_data(const GridFunction& g);

}  // namespace bvx::elliptic
