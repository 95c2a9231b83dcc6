#pragma once

#include <cstdint>
#include <vector>

namespace bvx::elliptic {

/// Real 2x2 matrix acting on (d_t, d_x); possibly non-symmetric.
struct Matrix2 {
    double tt = 1.0;
    double tx = 0.0;
    double xt = 0.0;
    double xx = 1.0;

    [[nodiscard]] double quadratic(double vt, double vx) const { return vt * (tt * vt + tx * vx) + vx * (xt * vt + xx * vx); }
};

/// Smallest eigenvalue of the symmetric part, i.e. min of (Av, v) over |v| = 1.
[[nodiscard]] double symmetric_min_eigenvalue(const Matrix2& a);
/// Largest singular value.
[[nodiscard]] double operator_norm(const Matrix2& a);
/// min of (Av, v) over `directions` equally spaced unit vectors.
[[nodiscard]] double probe_ellipticity(const Matrix2& a, int directions = 64);

/// t-independent coefficients for n = 1: one matrix per boundary cell.
/// Construction validates (A v, v) >= lambda |v|^2 with lambda > 0 on every
/// cell, both exactly and on a probe set; throws ConfigError otherwise.
class EllipticCoefficients {
public:
    EllipticCoefficients(int depth, std::vector<Matrix2> cells);

    [[nodiscard]] static EllipticCoefficients identity(int depth);
    /// Rotated diagonal part with eigenvalues in [lo, hi] plus a skew part of
    /// size at most `skew`, drawn per cell.
    [[nodiscard]] static EllipticCoefficients random(int depth, std::uint64_t seed, double lo = 0.5, double hi = 2.0,
                                                     double skew = 0.5);

    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }
    [[nodiscard]] const Matrix2& cell(std::size_t i) const { return cells_[i]; }
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] double norm_inf() const { return norm_; }

private:
    int depth_;
    std::vector<Matrix2> cells_;
    double lambda_ = 0.0;
    double norm_ = 0.0;
};

}  // namespace bvx::elliptic
