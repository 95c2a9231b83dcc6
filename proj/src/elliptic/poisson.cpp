#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "bvx/elliptic/solution.hpp"
#include "bvx/errors.hpp"
#include "bvx/quadrature.hpp"

namespace bvx::elliptic {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

constexpr int kOrder1d = 6;
constexpr int kOrder2d = 4;
constexpr int kOrderGraded = 16;
// Cells within this many cells of the evaluation point are integrated on
// graded panels once t drops below two cells.
constexpr std::int64_t kNear = 2;
// Series length for the far images. With t <= 1 the series variable stays
// within 0.75 of its radius of convergence, so 240 terms reach rounding.
constexpr std::size_t kFarTerms = 240;
constexpr std::size_t kFourierTerms = 24;

// Integral of f over [a, b] on panels graded geometrically away from `c`,
// starting at width `scale`; resolves kernels with a peak of width `scale` at c.
template <class F>
double graded_integrate(double c, double a, double b, double scale, F&& f) {
    const GaussRule& rule = gauss_rule(kOrderGraded);
    auto side = [&](double d_lo, double d_hi, double sign) {
        double s = 0.0;
        double p = d_lo;
        while (p < d_hi) {
            const double q = std::min(d_hi, p + std::max(scale, p));
            s += integrate(rule, p, q, [&](double d) { return f(c + sign * d); });
            p = q;
        }
        return s;
    };
    double s = 0.0;
    if (b > c) s += side(std::max(a - c, 0.0), b - c, 1.0);
    if (a < c) s += side(std::max(c - b, 0.0), c - a, -1.0);
    return s;
}

double kernel_2d(double t, double r2) {
    const double rho2 = t * t + r2;
    return t / (2.0 * kPi * rho2 * std::sqrt(rho2));
}

// (d_t K, d_x0 K, d_x1 K) for K the n = 2 Poisson kernel at offset (dx0, dx1).
std::array<double, 3> kernel_2d_gradient(double t, double dx0, double dx1) {
    const double rho2 = t * t + dx0 * dx0 + dx1 * dx1;
    const double r3 = 1.0 / (rho2 * std::sqrt(rho2));
    const double r5 = r3 / rho2;
    const double c = 1.0 / (2.0 * kPi);
    return {c * (r3 - 3.0 * t * t * r5), -3.0 * c * t * dx0 * r5, -3.0 * c * t * dx1 * r5};
}

// zeta(s) - 1 = sum_{k >= 2} k^{-s} for s >= 2, summed directly so the
// result keeps full relative accuracy when it is close to 2^{-s}.
double zeta_minus_one(double s) {
    constexpr int k_max = 64;
    double sum = 0.0;
    for (int k = k_max - 1; k >= 2; --k) sum += std::pow(static_cast<double>(k), -s);
    const double kk = k_max;
    // Euler-Maclaurin tail from k_max on.
    const double tail = std::pow(kk, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(kk, -s) + s * std::pow(kk, -s - 1.0) / 12.0 -
                        s * (s + 1.0) * (s + 2.0) * std::pow(kk, -s - 3.0) / 720.0;
    return sum + tail;
}

}  // namespace

PoissonField::PoissonField(const GridFunction& g, const kernels::Table& table, int image_radius)
    : table_(&table),
      n_(g.dim()),
      depth_(g.depth()),
      image_radius_(image_radius),
      mean_(mean(g)),
      g_(g.values().begin(), g.values().end()) {
    if (image_radius < 1) throw ConfigError("image radius must be >= 1");
    const double h = std::ldexp(1.0, -depth_);
    if (n_ == 1) {
        const GaussRule& rule = gauss_rule(kOrder1d);
        per_cell_ = rule.size();
        for (std::size_t i = 0; i < g_.size(); ++i)
            for (std::size_t q = 0; q < rule.size(); ++q) {
                y0_.push_back((static_cast<double>(i) + 0.5 + 0.5 * rule.nodes[q]) * h);
                w_.push_back(g_[i] * 0.5 * h * rule.weights[q] / kPi);
            }
        const std::size_t cells = g_.size();
        for (std::size_t k = 0; k <= cells; ++k) {
            const double right = k < cells ? g_[k] : 0.0;
            const double left = k > 0 ? g_[k - 1] : 0.0;
            edges_.push_back(static_cast<double>(k) * h);
            jumps_.push_back(right - left);
        }
        // Moments nu_i = int g(y) (y - 1/2)^i dy, exact per cell.
        std::vector<double> nu(kFarTerms + 1, 0.0);
        for (std::size_t c = 0; c < cells; ++c) {
            if (g_[c] == 0.0) continue;
            const double sa = static_cast<double>(c) * h - 0.5;
            const double sb = sa + h;
            double pa = sa;
            double pb = sb;
            for (std::size_t i = 0; i <= kFarTerms; ++i) {
                nu[i] += g_[c] * (pb - pa) / static_cast<double>(i + 1);
                pa *= sa;
                pb *= sb;
            }
        }
        // sum_{|m| >= 2} 1/(z - m) = sum over odd p of c_p z^p, c_p = -2 (zeta(p+1) - 1).
        // Integrating against g with z = a - (y - 1/2) and re-expanding in a:
        // d_q = sum_{p >= q} c_p C(p, q) (-1)^{p-q} nu_{p-q}.
        std::vector<double> c(kFarTerms + 1, 0.0);
        for (std::size_t p = 1; p <= kFarTerms; p += 2) c[p] = -2.0 * zeta_minus_one(static_cast<double>(p + 1));
        far_series_.assign(kFarTerms + 1, 0.0);
        for (std::size_t q = 0; q <= kFarTerms; ++q) {
            double binom = 1.0;  // C(p, q), starting at p = q
            double s = 0.0;
            for (std::size_t p = q; p <= kFarTerms; ++p) {
                if (p > q) binom = binom * static_cast<double>(p) / static_cast<double>(p - q);
                if (c[p] == 0.0) continue;
                const double sign = (p - q) % 2 == 0 ? 1.0 : -1.0;
                s += c[p] * binom * sign * nu[p - q];
            }
            far_series_[q] = s;
        }
        // ghat_k = int_0^1 g(y) e^{-2 pi i k y} dy.
        fourier_.assign(kFourierTerms + 1, Complex{});
        for (std::size_t k = 0; k <= kFourierTerms; ++k) {
            Complex s{};
            for (std::size_t cell = 0; cell < cells; ++cell) {
                if (g_[cell] == 0.0) continue;
                const double a = static_cast<double>(cell) * h;
                if (k == 0) {
                    s += g_[cell] * h;
                    continue;
                }
                const double w = 2.0 * kPi * static_cast<double>(k);
                s += g_[cell] * (std::polar(1.0, -w * a) - std::polar(1.0, -w * (a + h))) / Complex(0.0, w);
            }
            fourier_[k] = s;
        }
    } else {
        for (double& v : g_) v -= mean_;
        const GaussRule& rule = gauss_rule(kOrder2d);
        per_cell_ = rule.size() * rule.size();
        const std::size_t side = std::size_t{1} << depth_;
        for (std::size_t i = 0; i < g_.size(); ++i) {
            const double a0 = static_cast<double>(i / side);
            const double a1 = static_cast<double>(i % side);
            for (std::size_t p = 0; p < rule.size(); ++p)
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    y0_.push_back((a0 + 0.5 + 0.5 * rule.nodes[p]) * h);
                    y1_.push_back((a1 + 0.5 + 0.5 * rule.nodes[q]) * h);
                    w_.push_back(g_[i] * 0.25 * h * h * rule.weights[p] * rule.weights[q] / (2.0 * kPi));
                }
        }
    }
}

double PoissonField::value(double t, std::span<const double> x) const {
    if (!(t > 0.0)) throw std::domain_error("Poisson field is evaluated at t > 0 only");
    if (x.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("point dimension mismatch");
    if (n_ == 1) return value_1d(t, x[0]);
    const double x0 = x[0] - std::floor(x[0]);
    const double x1 = x[1] - std::floor(x[1]);
    double s = mean_;
    for (int m0 = -image_radius_; m0 <= image_radius_; ++m0)
        for (int m1 = -image_radius_; m1 <= image_radius_; ++m1) s += direct_2d(t, x0 - m0, x1 - m1);
    return s;
}

double PoissonField::value_1d(double t, double x) const {
    x -= std::floor(x);
    if (t > 1.0) {
        const Complex e = std::polar(std::exp(-2.0 * kPi * t), 2.0 * kPi * x);
        Complex p = e;
        double s = fourier_[0].real();
        for (std::size_t k = 1; k < fourier_.size(); ++k) {
            s += 2.0 * (fourier_[k] * p).real();
            p *= e;
        }
        return s;
    }
    double s = direct_1d(t, x) + direct_1d(t, x - 1.0) + direct_1d(t, x + 1.0);
    const Complex a(x - 0.5, -t);
    Complex phi{};
    for (std::size_t q = far_series_.size(); q-- > 0;) phi = phi * a + far_series_[q];
    return s + phi.imag() / kPi;
}

double PoissonField::direct_1d(double t, double x) const {
    const double h = std::ldexp(1.0, -depth_);
    const std::size_t total = y0_.size();
    if (t >= 2.0 * h) return table_->halfplane_poisson(t, x, y0_.data(), w_.data(), total);
    const auto cells = static_cast<std::int64_t>(g_.size());
    const std::int64_t home = static_cast<std::int64_t>(std::floor(x / h));
    const std::int64_t lo = std::clamp(home - kNear, std::int64_t{0}, cells);
    const std::int64_t hi = std::clamp(home + kNear + 1, std::int64_t{0}, cells);  // exclusive
    const auto a = static_cast<std::size_t>(lo) * per_cell_;
    const auto b = static_cast<std::size_t>(std::max(hi, lo)) * per_cell_;
    double s = table_->halfplane_poisson(t, x, y0_.data(), w_.data(), a);
    s += table_->halfplane_poisson(t, x, y0_.data() + b, w_.data() + b, total - b);
    for (std::int64_t i = lo; i < hi; ++i) {
        const double gi = g_[static_cast<std::size_t>(i)];
        if (gi == 0.0) continue;
        const double left = static_cast<double>(i) * h;
        s += gi / kPi * graded_integrate(x, left, left + h, t, [&](double y) { return t / (t * t + (x - y) * (x - y)); });
    }
    return s;
}

double PoissonField::direct_2d(double t, double x0, double x1) const {
    const double h = std::ldexp(1.0, -depth_);
    const std::size_t total = w_.size();
    if (t >= 2.0 * h) return table_->halfspace_poisson(t, x0, x1, y0_.data(), y1_.data(), w_.data(), total);
    const auto side = static_cast<std::int64_t>(std::size_t{1} << depth_);
    const std::int64_t h0 = static_cast<std::int64_t>(std::floor(x0 / h));
    const std::int64_t h1 = static_cast<std::int64_t>(std::floor(x1 / h));
    const std::int64_t r0 = std::clamp(h0 - kNear, std::int64_t{0}, side);
    const std::int64_t r1 = std::clamp(h0 + kNear + 1, std::int64_t{0}, side);
    const std::int64_t c0 = std::clamp(h1 - kNear, std::int64_t{0}, side);
    const std::int64_t c1 = std::clamp(h1 + kNear + 1, std::int64_t{0}, side);
    auto far = [&](std::int64_t from_cell, std::int64_t to_cell) {
        if (to_cell <= from_cell) return 0.0;
        const auto a = static_cast<std::size_t>(from_cell) * per_cell_;
        const auto n = static_cast<std::size_t>(to_cell - from_cell) * per_cell_;
        return table_->halfspace_poisson(t, x0, x1, y0_.data() + a, y1_.data() + a, w_.data() + a, n);
    };
    if (r1 <= r0 || c1 <= c0) return far(0, side * side);
    double s = far(0, r0 * side) + far(r1 * side, side * side);
    for (std::int64_t k0 = r0; k0 < r1; ++k0) {
        s += far(k0 * side, k0 * side + c0) + far(k0 * side + c1, (k0 + 1) * side);
        for (std::int64_t k1 = c0; k1 < c1; ++k1) {
            const double gi = g_[static_cast<std::size_t>(k0 * side + k1)];
            if (gi == 0.0) continue;
            const double a0 = static_cast<double>(k0) * h;
            const double a1 = static_cast<double>(k1) * h;
            s += gi * graded_integrate(x0, a0, a0 + h, t, [&](double y0) {
                const double d0 = (x0 - y0) * (x0 - y0);
                return graded_integrate(x1, a1, a1 + h, t,
                                        [&](double y1) { return kernel_2d(t, d0 + (x1 - y1) * (x1 - y1)); });
            });
        }
    }
    return s;
}

std::array<double, 3> PoissonField::gradient(double t, std::span<const double> x) const {
    if (!(t > 0.0)) throw std::domain_error("Poisson field is evaluated at t > 0 only");
    if (x.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("point dimension mismatch");
    if (n_ == 1) return gradient_1d(t, x[0]);
    const double x0 = x[0] - std::floor(x[0]);
    const double x1 = x[1] - std::floor(x[1]);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int m0 = -image_radius_; m0 <= image_radius_; ++m0)
        for (int m1 = -image_radius_; m1 <= image_radius_; ++m1) {
            const auto d = direct_gradient_2d(t, x0 - m0, x1 - m1);
            for (std::size_t a = 0; a < 3; ++a) out[a] += d[a];
        }
    return out;
}

std::array<double, 3> PoissonField::gradient_1d(double t, double x) const {
    x -= std::floor(x);
    if (t > 1.0) {
        const Complex e = std::polar(std::exp(-2.0 * kPi * t), 2.0 * kPi * x);
        Complex p = e;
        double dt = 0.0;
        double dx = 0.0;
        for (std::size_t k = 1; k < fourier_.size(); ++k) {
            const double w = 2.0 * kPi * static_cast<double>(k);
            const Complex term = 2.0 * fourier_[k] * p;
            dt += -w * term.real();
            dx += (Complex(0.0, w) * term).real();
            p *= e;
        }
        return {dt, dx, 0.0};
    }
    // u_x = (1/pi) sum_e jump_e t/(t^2 + (x-e)^2), u_t = -(1/pi) sum_e jump_e (x-e)/(t^2 + (x-e)^2).
    double dx = 0.0;
    double dt = 0.0;
    for (double shift : {-1.0, 0.0, 1.0}) {
        dx += table_->halfplane_poisson(t, x + shift, edges_.data(), jumps_.data(), edges_.size());
        dt -= table_->halfplane_dipole(t, x + shift, edges_.data(), jumps_.data(), edges_.size());
    }
    // The far images contribute Im(phi(a)) / pi with a = x - 1/2 - i t.
    const Complex a(x - 0.5, -t);
    Complex dphi{};
    for (std::size_t q = far_series_.size(); q-- > 1;) dphi = dphi * a + static_cast<double>(q) * far_series_[q];
    dx += dphi.imag();
    dt += -dphi.real();
    return {dt / kPi, dx / kPi, 0.0};
}

std::array<double, 3> PoissonField::direct_gradient_2d(double t, double x0, double x1) const {
    const double h = std::ldexp(1.0, -depth_);
    const auto side = static_cast<std::int64_t>(std::size_t{1} << depth_);
    const std::int64_t h0 = static_cast<std::int64_t>(std::floor(x0 / h));
    const std::int64_t h1 = static_cast<std::int64_t>(std::floor(x1 / h));
    const bool refine = t < 2.0 * h;
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const double c = 2.0 * kPi;  // w_ carries 1/(2 pi); the gradient kernel carries its own
    for (std::int64_t k0 = 0; k0 < side; ++k0)
        for (std::int64_t k1 = 0; k1 < side; ++k1) {
            const auto cell = static_cast<std::size_t>(k0 * side + k1);
            if (g_[cell] == 0.0) continue;
            const bool near = refine && std::abs(k0 - h0) <= kNear && std::abs(k1 - h1) <= kNear;
            if (!near) {
                for (std::size_t q = cell * per_cell_; q < (cell + 1) * per_cell_; ++q) {
                    const auto k = kernel_2d_gradient(t, x0 - y0_[q], x1 - y1_[q]);
                    for (std::size_t a = 0; a < 3; ++a) out[a] += c * w_[q] * k[a];
                }
                continue;
            }
            const double a0 = static_cast<double>(k0) * h;
            const double a1 = static_cast<double>(k1) * h;
            for (std::size_t a = 0; a < 3; ++a)
                out[a] += g_[cell] * graded_integrate(x0, a0, a0 + h, t, [&](double y0) {
                    return graded_integrate(x1, a1, a1 + h, t,
                                            [&](double y1) { return kernel_2d_gradient(t, x0 - y0, x1 - y1)[a]; });
                });
        }
    return out;
}

std::unique_ptr<SolutionField> solve_poisson(const GridFunction& g) { return std::make_unique<PoissonField>(g); }

}  // namespace bvx::elliptic
