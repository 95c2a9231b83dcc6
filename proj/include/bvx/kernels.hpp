#pragma once

#include <cstddef>
#include <span>
#include <string_view>

/// Flat numeric kernels with a scalar reference and an AVX2 variant.
///
/// The variant is chosen once per process from CPUID, unless the environment
/// variable BVEXTEND_ISA is set to "scalar". Reductions in the AVX2 variant
/// use a different association order, so sums agree with the scalar
/// reference only up to rounding; max-type kernels agree bitwise.
namespace bvx::kernels {

enum class Isa { scalar, avx2 };

struct Table {
    double (*sum)(const double* v, std::size_t n);
    double (*sum_abs)(const double* v, std::size_t n);
    double (*sum_squares)(const double* v, std::size_t n);
    double (*max_abs)(const double* v, std::size_t n);
    /// dst[i] = max(dst[i], src[i])
    void (*max_into)(double* dst, const double* src, std::size_t n);
    /// sum_i w[i] * t / (t^2 + (x - y[i])^2)
    double (*halfplane_poisson)(double t, double x, const double* y, const double* w, std::size_t n);
    /// sum_i w[i] * (x - y[i]) / (t^2 + (x - y[i])^2)
    double (*halfplane_dipole)(double t, double x, const double* y, const double* w, std::size_t n);
    /// sum_i w[i] * t / (t^2 + |x - y_i|^2)^{3/2}, points y_i = (y0[i], y1[i])
    double (*halfspace_poisson)(double t, double x0, double x1, const double* y0, const double* y1,
                                const double* w, std::size_t n);
};

[[nodiscard]] bool available(Isa isa) noexcept;
[[nodiscard]] const Table& table(Isa isa);
[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] std::string_view name(Isa isa) noexcept;

/// Tables for each variant. The AVX2 table must only be called when
/// available(Isa::avx2) is true.
const Table& scalar_table() noexcept;
const Table& avx2_table() noexcept;

inline const Table& active() { return table(active_isa()); }

inline double sum(std::span<const double> v) { return active().sum(v.data(), v.size()); }
inline double sum_abs(std::span<const double> v) { return active().sum_abs(v.data(), v.size()); }
inline double sum_squares(std::span<const double> v) { return active().sum_squares(v.data(), v.size()); }
inline double max_abs(std::span<const double> v) { return active().max_abs(v.data(), v.size()); }

}  // namespace bvx::kernels
