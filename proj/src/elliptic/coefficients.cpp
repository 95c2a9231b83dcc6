#include "bvx/elliptic/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "bvx/errors.hpp"

namespace bvx::elliptic {

double symmetric_min_eigenvalue(const Matrix2& a) {
    const double off = 0.5 * (a.tx + a.xt);
    const double mid = 0.5 * (a.tt + a.xx);
    const double rad = std::hypot(0.5 * (a.tt - a.xx), off);
    return mid - rad;
}

double operator_norm(const Matrix2& a) {
    // Singular values of a 2x2 matrix from its Frobenius norm and determinant.
    const double f = a.tt * a.tt + a.tx * a.tx + a.xt * a.xt + a.xx * a.xx;
    const double d = a.tt * a.xx - a.tx * a.xt;
    return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * d * d))));
}

double probe_ellipticity(const Matrix2& a, int directions) {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < directions; ++i) {
        const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(directions);
        lo = std::min(lo, a.quadratic(std::cos(th), std::sin(th)));
    }
    return lo;
}

EllipticCoefficients::EllipticCoefficients(int depth, std::vector<Matrix2> cells)
    : depth_(depth), cells_(std::move(cells)) {
    if (depth < 0 || depth > 24) throw ConfigError("coefficients.depth out of range");
    if (cells_.size() != (std::size_t{1} << depth)) throw ConfigError("coefficients: need one matrix per boundary cell");
    lambda_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Matrix2& a = cells_[i];
        const double exact = symmetric_min_eigenvalue(a);
        const double probed = probe_ellipticity(a);
        if (!std::isfinite(exact) || !(exact > 0.0) || !(probed > 0.0))
            throw ConfigError("coefficients: ellipticity violated on cell " + std::to_string(i));
        lambda_ = std::min(lambda_, exact);
        norm_ = std::max(norm_, operator_norm(a));
    }
}

EllipticCoefficients EllipticCoefficients::identity(int depth) {
    return EllipticCoefficients(depth, std::vector<Matrix2>(std::size_t{1} << depth));
}

EllipticCoefficients EllipticCoefficients::random(int depth, std::uint64_t seed, double lo, double hi, double skew) {
    if (!(lo > 0.0 && hi >= lo)) throw ConfigError("coefficients: eigenvalue range must satisfy 0 < lo <= hi");
    if (!(skew >= 0.0)) throw ConfigError("coefficients: skew must be >= 0");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double a, double b) { return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Matrix2> cells(std::size_t{1} << depth);
    for (Matrix2& m : cells) {
        const double th = uniform(0.0, std::numbers::pi);
        const double l1 = uniform(lo, hi);
        const double l2 = uniform(lo, hi);
        const double s = uniform(-skew, skew);
        const double c = std::cos(th);
        const double n = std::sin(th);
        m.tt = l1 * c * c + l2 * n * n;
        m.xx = l1 * n * n + l2 * c * c;
        m.tx = (l1 - l2) * c * n + s;
        m.xt = (l1 - l2) * c * n - s;
    }
    return EllipticCoefficients(depth, std::move(cells));
}

}  // namespace bvx::elliptic
