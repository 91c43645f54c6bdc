#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rodtbc/adtbc.hpp"
#include "rodtbc/diagnostics.hpp"
#include "rodtbc/error.hpp"
#include "rodtbc/initial_data.hpp"
#include "rodtbc/params.hpp"
#include "rodtbc/stepper.hpp"

namespace rodtbc {

/// Eigenvalue moduli of the one-step matrix [[-b, -1], [1, 0]] of the scheme
/// for the Fourier mode exp(i xi x).
struct Amplification {
    double b = 0.0;             ///< trace term of z^2 + b z + 1 = 0
    double discriminant = 0.0;  ///< b^2 - 4; non-positive means |z1| = |z2| = 1
    double modulus1 = 1.0;
    double modulus2 = 1.0;

    double max_modulus() const { return std::max(modulus1, modulus2); }
};

inline Amplification cauchy_amplification(double xi, double h, double nu, double mu) {
    const double half = std::sin(0.5 * xi * h);
    const double s = 2.0 * half * half;  // 1 - cos(xi h) without cancellation
    const double denom = 1.0 + 2.0 * mu * s + 2.0 * nu * s * s;
    if (!(denom > 0.0)) throw Error("cauchy_amplification: non-positive symbol denominator");
    Amplification a;
    a.b = -(2.0 + 4.0 * mu * s) / denom;
    a.discriminant = a.b * a.b - 4.0;
    if (a.discriminant <= 0.0) return a;  // complex-conjugate pair with product 1
    const double r = std::sqrt(a.discriminant);
    // larger root first, smaller as 1 / larger (product of the roots is 1)
    const double big = 0.5 * (std::abs(a.b) + r);
    a.modulus1 = big;
    a.modulus2 = 1.0 / big;
    return a;
}

struct CauchyReport {
    double max_modulus = 0.0;
    double max_discriminant = -4.0;
    double xi_at_max = 0.0;
    double modulus_at_zero = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

inline constexpr std::size_t kCauchySamples = 10000;
inline constexpr double kCauchyTolerance = 1e-12;

/// Samples xi uniformly on [0, pi/h] (endpoints included).
inline CauchyReport check_cauchy(double h, double nu, double mu, std::size_t samples = kCauchySamples) {
    if (samples < 2) throw ConfigError("check_cauchy: need at least two samples");
    CauchyReport rep;
    rep.samples = samples;
    const double xi_max = std::numbers::pi / h;
    for (std::size_t i = 0; i < samples; ++i) {
        const double xi = xi_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        const auto a = cauchy_amplification(xi, h, nu, mu);
        if (i == 0) rep.modulus_at_zero = a.max_modulus();
        if (a.max_modulus() > rep.max_modulus) {
            rep.max_modulus = a.max_modulus();
            rep.xi_at_max = xi;
        }
        rep.max_discriminant = std::max(rep.max_discriminant, a.discriminant);
    }
    rep.pass = std::abs(rep.max_modulus - 1.0) <= kCauchyTolerance;
    return rep;
}

/// Stability criteria checked per time step against the initial values.
struct Criteria {
    bool energy = true;
    bool C = true;
    bool L2 = true;
};

inline constexpr double kCriterionSlack = 1e-10;

/// Verdict of one (h, tau) cell. Step indices are 0 when the criterion holds;
/// verdicts are meaningful only when bc_exists.
struct CellVerdict {
    double h = 0.0;
    double tau = 0.0;
    bool bc_exists = false;
    bool diverged = false;
    std::size_t energy_violation = 0;  ///< first n with sqrt H[u^{n+1/2}] > sqrt H[u^{1/2}]
    std::size_t C_violation = 0;       ///< first n with |u^n|_C > |u^0|_C
    std::size_t L2_violation = 0;      ///< first n with |u^n|_L2 > |u^0|_L2

    bool stable_energy() const { return bc_exists && energy_violation == 0 && !diverged; }
    bool stable_C() const { return bc_exists && C_violation == 0 && !diverged; }
    bool stable_L2() const { return bc_exists && L2_violation == 0 && !diverged; }
    bool stable() const { return stable_energy() && stable_C() && stable_L2(); }

    /// Earliest violation over all criteria, 0 if none.
    std::size_t first_violation_step() const {
        std::size_t first = 0;
        for (std::size_t s : {energy_violation, C_violation, L2_violation})
            if (s != 0 && (first == 0 || s < first)) first = s;
        return first;
    }
};

/// Cells of an (h, tau) scan. Column i holds step h[i] with its own tau list;
/// cells are stored column by column.
struct StabilityMap {
    std::vector<double> h;
    std::vector<std::vector<double>> tau;
    std::vector<CellVerdict> cells;
    DegreeSet degrees[2];
    bool const_constraint = false;
    std::size_t steps = 0;

    std::size_t columns() const { return h.size(); }
    std::size_t rows(std::size_t col) const { return tau[col].size(); }
    std::size_t index(std::size_t col, std::size_t row) const {
        std::size_t off = 0;
        for (std::size_t c = 0; c < col; ++c) off += tau[c].size();
        return off + row;
    }
    const CellVerdict& at(std::size_t col, std::size_t row) const { return cells[index(col, row)]; }
};

struct ScanConfig {
    RodModel rod;
    std::vector<double> h;
    std::vector<std::vector<double>> tau;
    DegreeSet d1{4, 4, 8, 8};
    DegreeSet d2{4, 4, 8, 8};
    bool const_constraint = false;
    std::size_t steps = 10000;
    InitialProfile profile = InitialProfile::odd_gaussian;
    unsigned threads = 0;  ///< 0 picks the hardware concurrency
};

inline constexpr std::size_t kDeskScanSteps = 10000;
inline constexpr std::size_t kFullScanSteps = 100000;

/// Steps h = L / n for n geometrically spread between L / h_max and L / h_min.
inline std::vector<double> integer_grid_steps(double L, double h_min, double h_max, std::size_t count) {
    if (!(h_min > 0.0) || !(h_max >= h_min) || count == 0)
        throw ConfigError("scan h range must satisfy 0 < h_min <= h_max with count >= 1");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const double h = h_min * std::pow(h_max / h_min, f);
        const double n = std::max(1.0, std::round(L / h));
        const double snapped = L / n;
        if (out.empty() || std::abs(out.back() - snapped) > 1e-15) out.push_back(snapped);
    }
    return out;
}

inline std::vector<double> geometric_range(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw ConfigError("range must satisfy 0 < lo <= hi");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

/// Derives the ADTBC for one cell and runs `steps` steps from the profile,
/// stopping once every criterion has been violated.
inline CellVerdict evaluate_cell(const RodModel& rod, double h, double tau, const DegreeSet& d1,
                                 const DegreeSet& d2, bool const_constraint, std::size_t steps,
                                 InitialProfile profile = InitialProfile::odd_gaussian) {
    CellVerdict v;
    v.h = h;
    v.tau = tau;
    const auto grid = make_grid(rod, h, tau, tau * static_cast<double>(steps));
    const auto sc = scheme_coefficients(rod, grid);
    BoundaryOperator op;
    try {
        op = derive_adtbc(sc, d1, d2, const_constraint);
    } catch (const SingularSystem&) {
        return v;
    } catch (const RegimeError&) {
        return v;
    }
    v.bc_exists = true;

    const double x_left = -0.5 * rod.L;
    auto init = build_initial_data(make_profile(profile, rod.L), zero_profile(), rod, h, tau, x_left, grid.N);
    const auto n0 = grid_norms(init.u0, h);
    const double C0 = n0.C * (1.0 + kCriterionSlack);
    const double L20 = n0.L2 * (1.0 + kCriterionSlack);
    const double H0 = std::sqrt(hamiltonian_halfstep(init.u0, init.u1, rod, h, tau)) * (1.0 + kCriterionSlack);

    auto check_layer = [&](std::size_t n, const std::vector<double>& u) {
        const auto g = grid_norms(u, h);
        if (v.C_violation == 0 && g.C > C0) v.C_violation = n;
        if (v.L2_violation == 0 && g.L2 > L20) v.L2_violation = n;
    };
    check_layer(1, init.u1);

    try {
        Stepper stepper(sc, BoundaryTreatment::transparent(op), grid.N);
        std::vector<double> prev = init.u1;
        stepper.start(std::move(init.u0), std::move(init.u1));
        for (std::size_t n = 2; n <= steps; ++n) {
            const auto& u = stepper.step();
            check_layer(n, u);
            if (v.energy_violation == 0 && std::sqrt(hamiltonian_halfstep(prev, u, rod, h, tau)) > H0)
                v.energy_violation = n - 1;
            if (v.energy_violation && v.C_violation && v.L2_violation) break;
            prev = u;
        }
    } catch (const Divergence& d) {
        v.diverged = true;
        const std::size_t s = d.step();
        if (v.energy_violation == 0) v.energy_violation = s;
        if (v.C_violation == 0) v.C_violation = s;
        if (v.L2_violation == 0) v.L2_violation = s;
    } catch (const SingularSystem&) {
        v.diverged = true;
        v.energy_violation = v.C_violation = v.L2_violation = 1;
    }
    return v;
}

/// Independent cells evaluated by a pool of workers; results are stored by
/// cell index so the map does not depend on the thread count.
inline StabilityMap scan_stability(const ScanConfig& cfg) {
    if (cfg.h.size() != cfg.tau.size()) throw ConfigError("scan: one tau list per h value is required");
    if (cfg.steps < 1) throw ConfigError("scan: steps must be at least 1");
    cfg.d1.smallness_order(cfg.const_constraint);
    cfg.d2.smallness_order(cfg.const_constraint);

    StabilityMap map;
    map.h = cfg.h;
    map.tau = cfg.tau;
    map.degrees[0] = cfg.d1;
    map.degrees[1] = cfg.d2;
    map.const_constraint = cfg.const_constraint;
    map.steps = cfg.steps;

    std::vector<std::pair<double, double>> jobs;
    for (std::size_t c = 0; c < cfg.h.size(); ++c)
        for (double t : cfg.tau[c]) {
            if (!(t > 0.0) || !(cfg.h[c] > 0.0)) throw ConfigError("scan: h and tau must be positive");
            jobs.emplace_back(cfg.h[c], t);
        }
    map.cells.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            map.cells[i] = evaluate_cell(cfg.rod, jobs[i].first, jobs[i].second, cfg.d1, cfg.d2,
                                         cfg.const_constraint, cfg.steps, cfg.profile);
    };
    unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, jobs.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    return map;
}

/// Number of 4-connected groups of cells stable under all criteria
/// (neighbors share a column and adjacent rows, or adjacent columns and the same row).
inline std::size_t stable_band_count(const StabilityMap& map) {
    std::vector<char> seen(map.cells.size(), 0);
    std::size_t groups = 0;
    for (std::size_t c0 = 0; c0 < map.columns(); ++c0)
        for (std::size_t r0 = 0; r0 < map.rows(c0); ++r0) {
            if (seen[map.index(c0, r0)] || !map.at(c0, r0).stable()) continue;
            ++groups;
            std::vector<std::pair<std::size_t, std::size_t>> stack{{c0, r0}};
            seen[map.index(c0, r0)] = 1;
            while (!stack.empty()) {
                auto [c, r] = stack.back();
                stack.pop_back();
                auto visit = [&](std::size_t cc, std::size_t rr) {
                    if (cc >= map.columns() || rr >= map.rows(cc)) return;
                    const auto k = map.index(cc, rr);
                    if (seen[k] || !map.cells[k].stable()) return;
                    seen[k] = 1;
                    stack.emplace_back(cc, rr);
                };
                visit(c, r + 1);
                if (r > 0) visit(c, r - 1);
                visit(c + 1, r);
                if (c > 0) visit(c - 1, r);
            }
        }
    return groups;
}

struct BoundaryPoint {
    double h = 0.0;
    double tau = 0.0;
};

/// Least-squares fit tau = A h^2 of one band edge.
struct EdgeFit {
    double A = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

struct ParabolaFit {
    EdgeFit lower;
    EdgeFit upper;
    std::vector<BoundaryPoint> lower_points;
    std::vector<BoundaryPoint> upper_points;
};

inline constexpr std::size_t kMinBoundaryPoints = 5;

inline EdgeFit fit_edge(const std::vector<BoundaryPoint>& pts) {
    EdgeFit f;
    f.points = pts.size();
    double num = 0, den = 0, mean = 0;
    for (const auto& p : pts) {
        const double x = p.h * p.h;
        num += p.tau * x;
        den += x * x;
        mean += p.tau;
    }
    if (den == 0.0) throw Error("fit_edge: degenerate boundary points");
    f.A = num / den;
    mean /= static_cast<double>(pts.size());
    double ss_res = 0, ss_tot = 0;
    for (const auto& p : pts) {
        const double r = p.tau - f.A * p.h * p.h;
        ss_res += r * r;
        ss_tot += (p.tau - mean) * (p.tau - mean);
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return f;
}

/// Band edges per column: the geometric midpoint between the outermost stable
/// cell and its unstable neighbor. Columns whose band touches the scan edge
/// contribute no point on that side.
inline ParabolaFit fit_parabolas(const StabilityMap& map) {
    ParabolaFit fit;
    for (std::size_t c = 0; c < map.columns(); ++c) {
        std::optional<std::size_t> first, last;
        for (std::size_t r = 0; r < map.rows(c); ++r)
            if (map.at(c, r).stable()) {
                if (!first) first = r;
                last = r;
            }
        if (!first) continue;
        const auto& t = map.tau[c];
        if (*first > 0) fit.lower_points.push_back({map.h[c], std::sqrt(t[*first - 1] * t[*first])});
        if (*last + 1 < t.size()) fit.upper_points.push_back({map.h[c], std::sqrt(t[*last] * t[*last + 1])});
    }
    if (fit.lower_points.size() < kMinBoundaryPoints || fit.upper_points.size() < kMinBoundaryPoints)
        throw Error("fit_parabolas: need at least " + std::to_string(kMinBoundaryPoints) +
                    " boundary cells per edge (lower " + std::to_string(fit.lower_points.size()) +
                    ", upper " + std::to_string(fit.upper_points.size()) + ")");
    fit.lower = fit_edge(fit.lower_points);
    fit.upper = fit_edge(fit.upper_points);
    return fit;
}

}  // namespace rodtbc
