#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bvx/elliptic/solution.hpp"
#include "bvx/errors.hpp"

namespace bvx::elliptic {
namespace {

using Local = std::array<std::array<double, 4>, 4>;

// Local node p = 2 a + b sits at (t, x) offset (a h, b h).
Local element_stiffness(const Matrix2& m) {
    // The integrand is bilinear in each coordinate: the 2-point rule is exact.
    const double g = 0.5 / std::sqrt(3.0);
    const std::array<double, 2> pts{0.5 - g, 0.5 + g};
    Local k{};
    for (double s : pts)
        for (double r : pts) {
            // Reference gradients on the unit square, s along t and r along x.
            std::array<std::array<double, 2>, 4> grad{};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double lt = a == 1 ? s : 1.0 - s;
                    const double lx = b == 1 ? r : 1.0 - r;
                    const double dlt = a == 1 ? 1.0 : -1.0;
                    const double dlx = b == 1 ? 1.0 : -1.0;
                    grad[static_cast<std::size_t>(2 * a + b)] = {dlt * lx, lt * dlx};
                }
            for (std::size_t p = 0; p < 4; ++p)
                for (std::size_t q = 0; q < 4; ++q) {
                    const auto& gq = grad[q];
                    const auto& gp = grad[p];
                    const double at = m.tt * gq[0] + m.tx * gq[1];
                    const double ax = m.xt * gq[0] + m.xx * gq[1];
                    k[p][q] += 0.25 * (at * gp[0] + ax * gp[1]);
                }
        }
    // The stiffness of a square element does not depend on its width.
    return k;
}

}  // namespace

std::vector<double> fd_bottom_data(const GridFunction& g) {
    if (g.dim() != 1) throw ConfigError("the finite element backend supports n = 1 only");
    const std::size_t cells = g.size();
    std::vector<double> out(2 * cells + 1);
    for (std::size_t i = 0; i <= 2 * cells; ++i) {
        if (i % 2 == 1) {
            out[i] = g[i / 2];
        } else {
            const std::size_t c = i / 2;
            if (c == 0) out[i] = g[0];
            else if (c == cells) out[i] = g[cells - 1];
            else out[i] = 0.5 * (g[c - 1] + g[c]);
        }
    }
    return out;
}

FdSolution::FdSolution(const GridFunction& g, const EllipticCoefficients& a)
    : m_(2 * g.size()), h_(1.0 / static_cast<double>(2 * g.size())) {
    if (g.dim() != 1) throw ConfigError("the finite element backend supports n = 1 only");
    if (a.depth() != g.depth()) throw ConfigError("coefficient depth does not match the boundary data");
    const std::size_t side = m_ + 1;
    const std::size_t nodes = side * side;
    auto node = [side](std::size_t it, std::size_t ix) { return it * side + ix; };

    std::vector<Local> stiffness(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) stiffness[c] = element_stiffness(a.cell(c));
    const Local laplace = element_stiffness(Matrix2{});

    u_.assign(nodes, 0.0);
    const std::vector<double> bottom = fd_bottom_data(g);
    const double top = mean(g);
    for (std::size_t ix = 0; ix < side; ++ix) {
        u_[node(0, ix)] = bottom[ix];
        u_[node(m_, ix)] = top;
    }
    auto is_free = [this](std::size_t it) { return it > 0 && it < m_; };
    auto unknown = [side](std::size_t it, std::size_t ix) { return (it - 1) * side + ix; };
    const std::size_t free_count = (m_ - 1) * side;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(free_count * 9);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_count));
    for (std::size_t et = 0; et < m_; ++et)
        for (std::size_t ex = 0; ex < m_; ++ex) {
            const Local& k = stiffness[ex / 2];
            for (std::size_t p = 0; p < 4; ++p) {
                const std::size_t pt = et + p / 2;
                const std::size_t px = ex + p % 2;
                if (!is_free(pt)) continue;
                const auto row = static_cast<Eigen::Index>(unknown(pt, px));
                for (std::size_t q = 0; q < 4; ++q) {
                    const std::size_t qt = et + q / 2;
                    const std::size_t qx = ex + q % 2;
                    if (is_free(qt))
                        triplets.emplace_back(row, static_cast<Eigen::Index>(unknown(qt, qx)), k[p][q]);
                    else
                        rhs[row] -= k[p][q] * u_[node(qt, qx)];
                }
            }
        }
    Eigen::SparseMatrix<double> kff(static_cast<Eigen::Index>(free_count), static_cast<Eigen::Index>(free_count));
    kff.setFromTriplets(triplets.begin(), triplets.end());
    kff.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(kff);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    const double bnorm = rhs.norm();
    const double res = (kff * sol - rhs).norm();
    report_.residual = bnorm > 0.0 ? res / bnorm : res;
    if (!(report_.residual <= 1e-10))
        throw SolverError("finite element residual " + std::to_string(report_.residual) + " exceeds 1e-10");
    for (std::size_t it = 1; it < m_; ++it)
        for (std::size_t ix = 0; ix < side; ++ix)
            u_[node(it, ix)] = sol[static_cast<Eigen::Index>(unknown(it, ix))];

    // Energies element by element and the full K u for the boundary pairing.
    std::vector<double> ku(nodes, 0.0);
    for (std::size_t et = 0; et < m_; ++et)
        for (std::size_t ex = 0; ex < m_; ++ex) {
            const Local& k = stiffness[ex / 2];
            std::array<double, 4> ue{};
            std::array<std::size_t, 4> id{};
            for (std::size_t p = 0; p < 4; ++p) {
                id[p] = node(et + p / 2, ex + p % 2);
                ue[p] = u_[id[p]];
            }
            for (std::size_t p = 0; p < 4; ++p)
                for (std::size_t q = 0; q < 4; ++q) {
                    report_.energy += ue[p] * k[p][q] * ue[q];
                    report_.dirichlet_energy += ue[p] * laplace[p][q] * ue[q];
                    ku[id[p]] += k[p][q] * ue[q];
                }
        }
    for (std::size_t ix = 0; ix < side; ++ix)
        for (std::size_t it : {std::size_t{0}, m_}) report_.boundary_pairing += u_[node(it, ix)] * ku[node(it, ix)];
    report_.nodes = nodes;
    report_.lambda = a.lambda();
}

double FdSolution::value(double t, std::span<const double> x) const {
    if (x.size() != 1) throw std::invalid_argument("point dimension mismatch");
    const double st = std::clamp(t, 0.0, 1.0) / h_;
    const double sx = std::clamp(x[0], 0.0, 1.0) / h_;
    const std::size_t et = std::min(static_cast<std::size_t>(st), m_ - 1);
    const std::size_t ex = std::min(static_cast<std::size_t>(sx), m_ - 1);
    const double a = st - static_cast<double>(et);
    const double b = sx - static_cast<double>(ex);
    const std::size_t side = m_ + 1;
    const double u00 = u_[et * side + ex];
    const double u01 = u_[et * side + ex + 1];
    const double u10 = u_[(et + 1) * side + ex];
    const double u11 = u_[(et + 1) * side + ex + 1];
    return (1.0 - a) * ((1.0 - b) * u00 + b * u01) + a * ((1.0 - b) * u10 + b * u11);
}

std::array<double, 3> FdSolution::gradient(double t, std::span<const double> x) const {
    if (x.size() != 1) throw std::invalid_argument("point dimension mismatch");
    const double st = std::clamp(t, 0.0, 1.0) / h_;
    const double sx = std::clamp(x[0], 0.0, 1.0) / h_;
    const std::size_t et = std::min(static_cast<std::size_t>(st), m_ - 1);
    const std::size_t ex = std::min(static_cast<std::size_t>(sx), m_ - 1);
    const double a = st - static_cast<double>(et);
    const double b = sx - static_cast<double>(ex);
    const std::size_t side = m_ + 1;
    const double u00 = u_[et * side + ex];
    const double u01 = u_[et * side + ex + 1];
    const double u10 = u_[(et + 1) * side + ex];
    const double u11 = u_[(et + 1) * side + ex + 1];
    const double dt = ((1.0 - b) * (u10 - u00) + b * (u11 - u01)) / h_;
    const double dx = ((1.0 - a) * (u01 - u00) + a * (u11 - u10)) / h_;
    return {dt, dx, 0.0};
}

}  // namespace bvx::elliptic
