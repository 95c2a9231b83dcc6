// Exit-gate checks. Prints one PASS/FAIL line per criterion and exits with
// the number of failures. Tolerances are fixed here, not tuned per run.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bvx/elliptic/approximant.hpp"
#include "bvx/elliptic/envelopes.hpp"
#include "bvx/elliptic/families.hpp"
#include "bvx/experiment.hpp"
#include "bvx/functionals.hpp"
#include "bvx/jump_measure.hpp"
#include "bvx/martingale.hpp"
#include "bvx/stopped_square.hpp"
#include "bvx/stopping.hpp"
#include "bvx/trace_extension.hpp"
#include "oracles/dyadic_brute.hpp"
#include "oracles/cover_config.hpp"

namespace {

using bvx::DyadicCube;
using bvx::GridFunction;
using bvx::Lattice;
using bvx::StoppingFamily;
using bvx::WhitneyFunction;
using bvx::experiment::InputClass;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

std::set<std::size_t> members_of(const StoppingFamily& f) { return {f.cube_indices().begin(), f.cube_indices().end()}; }

GridFunction nonnegative(int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo;
    std::bernoulli_distribution hole(0.25);
    GridFunction g(1, depth);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = hole(rng) ? 0.0 : expo(rng);
    return g;
}

// Criteria 1 and 2 share one sweep.
struct SweepResult {
    std::size_t runs = 0;
    std::size_t closeness_violations = 0;
    double worst_closeness = 0.0;  // max of N_D(f - u) / (eps M_D g)
    double carleson_k[3] = {0.0, 0.0, 0.0};
    double seconds = 0.0;
};

SweepResult approximant_sweep() {
    SweepResult out;
    const auto start = Clock::now();
    const int depths[3] = {6, 8, 10};
    for (int d = 0; d < 3; ++d) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const GridFunction g = bvx::experiment::generate_input(InputClass::random, 1, depths[d], 1000 + seed);
            const GridFunction mg = bvx::maximal_dyadic(g);
            const GridFunction mmg = bvx::maximal_dyadic(mg);
            for (double eps : {0.25, 0.5}) {
                for (double p : {1.5, 2.0, 3.0}) {
                    const bvx::Approximant a = bvx::build_approximant(g, eps, p);
                    ++out.runs;
                    const GridFunction n = bvx::nontangential_max_dyadic(a.f - a.u);
                    for (std::size_t c = 0; c < g.size(); ++c) {
                        if (!(n[c] <= eps * mg[c])) ++out.closeness_violations;
                        if (mg[c] > 0.0) out.worst_closeness = std::max(out.worst_closeness, n[c] / (eps * mg[c]));
                    }
                    const GridFunction cv = bvx::carleson_of_gradient(
                        bvx::gradient_measure(a.f, bvx::GradientPart::vertical), bvx::CarlesonMode::dyadic);
                    for (std::size_t c = 0; c < g.size(); ++c)
                        if (mmg[c] > 0.0) out.carleson_k[d] = std::max(out.carleson_k[d], eps * cv[c] / mmg[c]);
                }
            }
        }
    }
    out.seconds = seconds_since(start);
    return out;
}

Outcome criterion1(const SweepResult& s) {
    const bool ok = s.closeness_violations == 0 && s.seconds <= 60.0;
    return {ok, format("%zu runs, %zu cell violations, max N(f-u)/(eps M g) = %.6f (bound 1), %.1f s (limit 60 s)",
                       s.runs, s.closeness_violations, s.worst_closeness, s.seconds)};
}

Outcome criterion2(const SweepResult& s) {
    const double k = s.carleson_k[0];
    const double growth = std::max(s.carleson_k[1], s.carleson_k[2]) / k;
    return {k > 0.0 && growth <= 1.1,
            format("K calibrated at J=6: %.6f; J=8: %.6f, J=10: %.6f; growth %.4f (limit 1.1)", k, s.carleson_k[1],
                   s.carleson_k[2], growth)};
}

Outcome criterion3() {
    std::size_t violations = 0;
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const GridFunction g = nonnegative(8, 5000 + seed);
        const Lattice lat = g.lattice();
        const auto m = bvx::truncated_maximal(g, lat);
        for (std::size_t q = 0; q < lat.size(); ++q) {
            if (!(m[q] > 0.0)) continue;
            const auto s = bvx::truncated_maximal_check(g, lat.cube(q));
            ++checked;
            if (!(s.lhs <= s.rhs)) ++violations;
            worst = std::max(worst, s.lhs / s.rhs);
        }
    }
    return {violations == 0, format("%zu (g, Q) pairs, %zu violations, max lhs/rhs = %.6f", checked, violations, worst)};
}

Outcome criterion4() {
    std::size_t l2_bad = 0;
    std::size_t orth_bad = 0;
    double worst_l2 = 0.0;
    double worst_orth = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int n = seed % 4 == 3 ? 2 : 1;
        const int depth = n == 1 ? 8 : 4;
        std::mt19937_64 rng(9000 + seed);
        std::normal_distribution<double> normal;
        GridFunction g(n, depth);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = normal(rng);
        const double density = 0.02 + 0.3 * static_cast<double>(seed % 10) / 10.0;
        const StoppingFamily fam = bvx::random_family(g.lattice(), density, 9000 + seed);
        const auto s = bvx::l2_bound_check(g, fam);
        if (!(s.lhs <= s.rhs * (1.0 + 1e-10))) ++l2_bad;
        worst_l2 = std::max(worst_l2, s.lhs / s.rhs);
        const double e = bvx::martingale_orthogonality_error(bvx::martingale_sequence(g, fam));
        if (!(e <= 1e-12)) ++orth_bad;
        worst_orth = std::max(worst_orth, e);
    }
    return {l2_bad == 0 && orth_bad == 0,
            format("1000 pairs: max ||Sg||^2/||g||^2 = %.6f (%zu over 1+1e-10), max orthogonality error %.2e "
                   "(%zu over 1e-12)",
                   worst_l2, l2_bad, worst_orth, orth_bad)};
}

Outcome criterion5() {
    std::size_t bad = 0;
    double worst = 0.0;
    const double factor = std::ldexp(1.0, -10);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(7000 + seed);
        std::normal_distribution<double> normal;
        GridFunction g(1, 8);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = normal(rng) + 0.5;
        const double p = seed % 3 == 0 ? 1.5 : (seed % 3 == 1 ? 2.0 : 3.0);
        const auto r = bvx::iterate_extension(g, 0.5, 10, p);
        const double err = bvx::lp_norm(bvx::trace_whitney(r.total).trace - g, p);
        const double bound = factor * bvx::lp_norm(g, p) + 1e-10;
        if (!(err <= bound)) ++bad;
        worst = std::max(worst, err / bound);
    }
    return {bad == 0, format("100 inputs, p in {1.5,2,3}: max ||trace f - g||_p / bound = %.3e, %zu violations", worst, bad)};
}

Outcome criterion6() {
    bool norms_exact = true;
    double c = INFINITY;
    std::vector<double> ks, mins, ratios;
    for (int k = 2; k <= 8; ++k) {
        const GridFunction g = bvx::lacunary_function(k, 10);
        double sq = 0.0;
        for (double v : g.values()) sq += v * v;
        sq *= g.cell_volume();
        norms_exact = norms_exact && sq == static_cast<double>(k + 1);
        const auto r = bvx::lacunary_report(k, 10);
        c = std::min(c, r.min_carleson / k);
        ks.push_back(k);
        mins.push_back(r.min_carleson);
        ratios.push_back(r.min_carleson / std::sqrt(sq));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) monotone = monotone && ratios[i] > ratios[i - 1];
    // Least-squares line through (k, min C_D(grad u)).
    const double n = static_cast<double>(ks.size());
    double sk = 0, sm = 0, skk = 0, skm = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sk += ks[i];
        sm += mins[i];
        skk += ks[i] * ks[i];
        skm += ks[i] * mins[i];
    }
    const double slope = (n * skm - sk * sm) / (n * skk - sk * sk);
    const double intercept = (sm - slope * sk) / n;
    std::ostringstream ratio_text;
    for (double r : ratios) ratio_text << format("%.4f ", r);
    return {norms_exact && c > 0.0 && monotone,
            format("||g||^2 = k+1 exactly: %s; c = min_k minC/k = %.5f; fit minC = %.5f k + %.5f; ratio minC/||g|| "
                   "by k=2..8: %s(monotone: %s)",
                   norms_exact ? "yes" : "no", c, slope, intercept, ratio_text.str().c_str(),
                   monotone ? "yes" : "no")};
}

Outcome criterion7() {
    namespace el = bvx::elliptic;
    const auto start = Clock::now();
    const int depths[3] = {8, 10, 12};
    struct Row {
        std::size_t closeness = 0;
        std::size_t cone_bound = 0;
        std::size_t sparse = 0;
        double cube_ratio = 0.0;
        double packing[3] = {0.0, 0.0, 0.0};
    };
    Row totals[3];
    for (int d = 0; d < 3; ++d) {
        const std::function<Row(std::size_t)> job = [&](std::size_t i) {
            const GridFunction g = bvx::experiment::generate_input(InputClass::random_smooth, 1, depths[d], 100 + i);
            const auto u = el::solve_poisson(g);
            el::EllipticParams params;
            params.eps = 0.25;
            const el::EllipticRun run = el::run_elliptic(*u, depths[d], params);
            const el::ApproximationReport r = el::approximation_report(run, *u);
            Row row;
            row.closeness = r.cube_violations + r.cell_violations;
            row.cone_bound = r.cone_bound.violations;
            row.sparse = r.sparse_violations;
            row.cube_ratio = std::max(r.cube_ratio, r.cell_ratio);
            row.packing[0] = r.packing_principal;
            row.packing[1] = r.packing_stopping;
            row.packing[2] = r.packing_oscillation;
            return row;
        };
        for (const Row& row : bvx::experiment::run_trials<Row>(20, bvx::experiment::worker_count(), job)) {
            totals[d].closeness += row.closeness;
            totals[d].cone_bound += row.cone_bound;
            totals[d].sparse += row.sparse;
            totals[d].cube_ratio = std::max(totals[d].cube_ratio, row.cube_ratio);
            for (int f = 0; f < 3; ++f) totals[d].packing[f] = std::max(totals[d].packing[f], row.packing[f]);
        }
    }
    const double secs = seconds_since(start);
    std::size_t closeness = 0, cone_bound = 0, sparse = 0;
    double ratio = 0.0;
    double growth = 0.0;
    for (int d = 0; d < 3; ++d) {
        closeness += totals[d].closeness;
        cone_bound += totals[d].cone_bound;
        sparse += totals[d].sparse;
        ratio = std::max(ratio, totals[d].cube_ratio);
        for (int f = 0; f < 3; ++f)
            if (totals[0].packing[f] > 0.0) growth = std::max(growth, totals[d].packing[f] / totals[0].packing[f]);
    }
    const bool ok = closeness == 0 && cone_bound == 0 && sparse == 0 && growth <= 1.1 && secs <= 300.0;
    std::string packing;
    for (int d = 0; d < 3; ++d)
        packing += format("J=%d P/S/R %.3f/%.3f/%.3f; ", depths[d], totals[d].packing[0], totals[d].packing[1],
                          totals[d].packing[2]);
    return {ok, format("(a) %zu closeness violations, max ratio %.4f; (b) %smax growth %.4f (limit 1.1); "
                       "(c) %zu violations; (d) %zu violations; %.1f s (limit 300 s)",
                       closeness, ratio, packing.c_str(), growth, cone_bound, sparse, secs)};
}

Outcome criterion8() {
    std::size_t mismatches = 0;
    std::size_t compared = 0;
    double square_diff = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int n = seed % 3 == 2 ? 2 : 1;
        const int depth = n == 1 ? 6 : 3;
        const Lattice lat = Lattice::full(n, depth);

        const StoppingFamily fam = bvx::random_family(lat, 0.05 + 0.01 * static_cast<double>(seed), 300 + seed);
        const std::vector<std::size_t> m(fam.cube_indices().begin(), fam.cube_indices().end());
        mismatches += bvx::carleson_packing(fam) != oracle::packing(lat, m);
        ++compared;

        std::mt19937_64 rng(400 + seed);
        std::normal_distribution<double> normal;
        GridFunction g(n, depth);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = normal(rng);
        const GridFunction g0 = g - GridFunction(n, depth, std::vector<double>(g.size(), bvx::mean(g)));
        for (double eps : {0.2, 0.5}) {
            mismatches += members_of(bvx::build_generations(g0, eps)) != oracle::average_generations(g0, eps);
            ++compared;
        }

        WhitneyFunction f(lat);
        for (std::size_t q = 0; q < lat.size(); ++q) f[q] = normal(rng);
        const GridFunction cd = bvx::carleson_dyadic(f);
        const auto cref = oracle::carleson_dyadic(f);
        for (std::size_t c = 0; c < cd.size(); ++c) mismatches += std::abs(cd[c] - cref[c]) > 1e-12 * (1.0 + cref[c]);
        ++compared;

        if (n == 1) {
            StoppingFamily all(lat);
            for (std::size_t q = 0; q < lat.size(); ++q) all.insert(q);
            const GridFunction s = bvx::stopped_square(g, all);
            const auto h = oracle::haar_square(g);
            for (std::size_t c = 0; c < s.size(); ++c) {
                square_diff = std::max(square_diff, std::abs(s[c] - h[c]) / (1.0 + h[c]));
                mismatches += std::abs(s[c] - h[c]) > 1e-12 * (1.0 + h[c]);
            }
            ++compared;
        }
    }
    // Skip-grid families at depth 6 with skip 2.
    namespace el = bvx::elliptic;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const GridFunction g = bvx::experiment::generate_input(seed % 2 ? InputClass::haar : InputClass::spike, 1, 6, seed);
        const auto u = el::solve_poisson(g);
        el::EllipticParams params;
        params.geometry = bvx::GeometryConfig::defaults(true, 2);
        const el::EllipticRun run = el::run_elliptic(*u, 6, params);
        const el::PrincipalRule principal{run.maximal, params.threshold};
        mismatches += members_of(run.principal) != oracle::stopping_family(run.lattice(), {0}, principal);
        const el::CorkscrewRule corkscrew{&run.samples, run.maximal, run.eps_internal};
        const std::vector<std::size_t> initial(run.principal.cube_indices().begin(), run.principal.cube_indices().end());
        mismatches += members_of(run.stopping) != oracle::stopping_family(run.lattice(), initial, corkscrew);
        compared += 2;
    }
    return {mismatches == 0, format("%zu comparisons at J <= 6, %zu mismatches; packing and family sets exact, "
                                    "functionals to 1e-12 relative (max square-function difference %.2e)",
                                    compared, mismatches, square_diff)};
}

Outcome criterion9() {
    namespace el = bvx::elliptic;
    const oracle::CoverConfig fig;
    const auto kids = fig.children();
    const auto filtered = el::uncovered_filter(fig.top, kids, 1.0 / 16.0, 6);
    const bool selection = filtered.selected == std::vector<std::size_t>{1, 2};

    const Lattice lat = Lattice::skip(1, fig.depth, fig.skip);
    StoppingFamily fam(lat);
    fam.insert(0);
    for (const auto& c : kids) fam.insert(lat.index(c));
    const GridFunction tent = el::tent_envelope(fam, 0, 1.0 / 16.0).sample(fig.depth);
    std::size_t exact = 0, cells = 0;
    for (std::size_t i : filtered.selected)
        for (std::size_t c : oracle::cells_in(kids[i], fig.depth)) {
            ++cells;
            exact += tent[c] == kids[i].side();
        }
    return {selection && exact == cells && cells > 0,
            format("selected {%s}; envelope equals l(S') on %zu of %zu cells of the uncovered cubes",
                   selection ? "large, far small" : "unexpected", exact, cells)};
}

}  // namespace

// Optional arguments select criteria by number; none runs all of them.
int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    const auto selected = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };
    int failures = 0;
    const auto report = [&](int id, const char* title, const std::function<Outcome()>& check) {
        if (!selected(id)) return;
        const Outcome o = check();
        std::printf("%s  criterion %d  %s: %s\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str());
        std::fflush(stdout);
        failures += o.passed ? 0 : 1;
    };
    SweepResult sweep;
    if (selected(1) || selected(2)) sweep = approximant_sweep();
    report(1, "pointwise closeness of the dyadic approximant", [&] { return criterion1(sweep); });
    report(2, "Carleson bound regression across depth", [&] { return criterion2(sweep); });
    report(3, "truncated maximal inequality with constant 4", criterion3);
    report(4, "stopped square function L2 bound and orthogonality", criterion4);
    report(5, "geometric extension round trip", criterion5);
    report(6, "lacunary separation", criterion6);
    report(7, "skip-grid construction for harmonic data", criterion7);
    report(8, "oracle equivalences", criterion8);
    report(9, "covered/uncovered configuration", criterion9);
    std::printf("%d criteria failed\n", failures);
    return failures;
}
