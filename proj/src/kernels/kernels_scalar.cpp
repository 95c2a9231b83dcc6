#include "bvx/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace bvx::kernels {
namespace {

double sum(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
}

double sum_abs(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(v[i]);
    return s;
}

double sum_squares(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
    return s;
}

double max_abs(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

void max_into(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::max(dst[i], src[i]);
}

double halfplane_poisson(double t, double x, const double* y, const double* w, std::size_t n) {
    const double t2 = t * t;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x - y[i];
        s += w[i] * t / (t2 + d * d);
    }
    return s;
}

double halfplane_dipole(double t, double x, const double* y, const double* w, std::size_t n) {
    const double t2 = t * t;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x - y[i];
        s += w[i] * d / (t2 + d * d);
    }
    return s;
}

double halfspace_poisson(double t, double x0, double x1, const double* y0, const double* y1,
                         const double* w, std::size_t n) {
    const double t2 = t * t;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d0 = x0 - y0[i];
        const double d1 = x1 - y1[i];
        const double r2 = t2 + d0 * d0 + d1 * d1;
        s += w[i] * t / (r2 * std::sqrt(r2));
    }
    return s;
}

constexpr Table kScalar{sum,      sum_abs,           sum_squares,      max_abs,
                        max_into, halfplane_poisson, halfplane_dipole, halfspace_poisson};

}  // namespace

const Table& scalar_table() noexcept { return kScalar; }

}  // namespace bvx::kernels
