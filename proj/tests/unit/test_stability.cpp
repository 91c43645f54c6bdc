#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rodtbc/stability.hpp"

using namespace rodtbc;

namespace {

// Largest root modulus of z^2 + (B/A) z + 1 with the stencil symbols
// A = alpha + 2 beta cos(t) + 2 sigma cos(2t), B = delta + 2 gamma cos(t).
double symbol_oracle(double xi, double h, double nu, double mu, double* ratio = nullptr) {
    const auto sc = scheme_coefficients(nu, mu);
    const double t = xi * h;
    const double A = sc.alpha + 2 * sc.beta * std::cos(t) + 2 * sc.sigma * std::cos(2 * t);
    const double B = sc.delta + 2 * sc.gamma * std::cos(t);
    const double b = B / A;
    if (ratio) *ratio = b;
    const std::complex<double> d = std::sqrt(std::complex<double>(b * b - 4.0));
    return std::max(std::abs((-b + d) / 2.0), std::abs((-b - d) / 2.0));
}

CellVerdict stable_cell() {
    CellVerdict v;
    v.bc_exists = true;
    return v;
}

CellVerdict unstable_cell() {
    CellVerdict v;
    v.bc_exists = true;
    v.energy_violation = v.C_violation = v.L2_violation = 1;
    return v;
}

// Columns whose band edges sit exactly at 1 h^2 and 3 h^2 (geometric midpoints).
StabilityMap synthetic_band(std::size_t columns) {
    StabilityMap map;
    for (std::size_t c = 0; c < columns; ++c) {
        const double h = 0.01 + 0.004 * static_cast<double>(c);
        const double h2 = h * h;
        map.h.push_back(h);
        map.tau.push_back({0.5 * h2, 2.0 * h2, 2.5 * h2, 3.6 * h2, 5.0 * h2});
        for (std::size_t r = 0; r < 5; ++r) map.cells.push_back(r == 1 || r == 2 ? stable_cell() : unstable_cell());
    }
    return map;
}

}  // namespace

TEST(Stability, ZeroWavenumberIsNeutral) {
    const auto a = cauchy_amplification(0.0, 0.02, 4.27, 0.0025);
    EXPECT_EQ(a.b, -2.0);
    EXPECT_EQ(a.discriminant, 0.0);
    EXPECT_EQ(a.max_modulus(), 1.0);
}

TEST(Stability, SymbolMatchesStencilOracle) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(1e-6, 10.0), x(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double nu = u(gen), mu = u(gen), h = 0.02, xi = x(gen) * std::numbers::pi / h;
        double b = 0.0;
        const double oracle = symbol_oracle(xi, h, nu, mu, &b);
        const auto a = cauchy_amplification(xi, h, nu, mu);
        EXPECT_NEAR(a.b, b, 1e-12);
        EXPECT_NEAR(a.max_modulus(), oracle, 1e-7);
        EXPECT_LE(a.discriminant, 1e-15);
    }
}

TEST(Stability, CauchyProblemIsNeutrallyStableForSteelRod) {
    const auto m = steel_model();
    const auto rep = check_cauchy(m.grid.h, m.coeffs.nu, m.coeffs.mu);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.samples, 10000u);
    EXPECT_EQ(rep.modulus_at_zero, 1.0);
    EXPECT_NEAR(rep.max_modulus, 1.0, 1e-12);
    EXPECT_LE(rep.max_discriminant, 0.0);
}

TEST(Stability, CauchyProblemIsNeutrallyStableForRandomParameters) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 20; ++k) {
        double nu = 0.0, mu = 0.0;
        while (nu == 0.0) nu = u(gen);
        while (mu == 0.0) mu = u(gen);
        EXPECT_TRUE(check_cauchy(0.02, nu, mu).pass) << nu << " " << mu;
    }
    EXPECT_TRUE(check_cauchy(1.0, 1.0, 1.0).pass);
}

TEST(Stability, SyntheticBandRecoversParabolas) {
    const auto map = synthetic_band(8);
    EXPECT_EQ(stable_band_count(map), 1u);
    const auto fit = fit_parabolas(map);
    EXPECT_NEAR(fit.lower.A, 1.0, 1e-6);
    EXPECT_NEAR(fit.upper.A, 3.0, 1e-6);
    EXPECT_NEAR(fit.lower.r_squared, 1.0, 1e-9);
    EXPECT_NEAR(fit.upper.r_squared, 1.0, 1e-9);
    EXPECT_EQ(fit.lower.points, 8u);
}

TEST(Stability, DetachedBandsAreCounted) {
    auto map = synthetic_band(6);
    map.cells[map.index(3, 1)] = unstable_cell();
    map.cells[map.index(3, 2)] = unstable_cell();
    EXPECT_EQ(stable_band_count(map), 2u);
}

TEST(Stability, FitNeedsFiveBoundaryCells) {
    EXPECT_THROW(fit_parabolas(synthetic_band(4)), Error);
    EXPECT_NO_THROW(fit_parabolas(synthetic_band(5)));
}

TEST(Stability, MissingConditionIsNotStable) {
    CellVerdict v;
    EXPECT_FALSE(v.stable());
    EXPECT_FALSE(v.stable_energy());
    v.C_violation = 7;
    v.L2_violation = 3;
    v.bc_exists = true;
    EXPECT_EQ(v.first_violation_step(), 3u);
    EXPECT_TRUE(v.stable_energy());
    EXPECT_FALSE(v.stable_C());
}

TEST(Stability, CellOutsideLegendreRegimeHasNoCondition) {
    const auto v = evaluate_cell(steel_rod(), 0.02, 1e-7, DegreeSet{4, 4, 8, 8}, DegreeSet{4, 4, 8, 8}, false, 100);
    EXPECT_FALSE(v.bc_exists);
    EXPECT_FALSE(v.stable());
}

TEST(Stability, SteelCellIsStable) {
    const DegreeSet d{4, 4, 8, 8};
    const auto v = evaluate_cell(steel_rod(), 0.02, 1.6e-4, d, d, false, kDeskScanSteps);
    EXPECT_TRUE(v.bc_exists);
    EXPECT_FALSE(v.diverged);
    EXPECT_TRUE(v.stable()) << v.energy_violation << " " << v.C_violation << " " << v.L2_violation;
}

TEST(Stability, ViolationIndicesMatchDirectRun) {
    const DegreeSet d{4, 4, 8, 8};
    const auto rod = steel_rod();
    const double h = 0.02, tau = 8e-5;
    const std::size_t steps = 3000;
    const auto v = evaluate_cell(rod, h, tau, d, d, false, steps);
    ASSERT_TRUE(v.bc_exists);
    ASSERT_NE(v.first_violation_step(), 0u) << "cell expected to be unstable";

    RunConfig cfg;
    cfg.model = make_model(rod, h, tau, tau * steps);
    cfg.bc = BoundaryTreatment::transparent(derive_adtbc(cfg.model.coeffs, d, false));
    cfg.U0 = make_profile(InitialProfile::odd_gaussian, rod.L);
    std::size_t energy = 0, C = 0;
    try {
        const auto traj = run(cfg);
        const auto& H = traj.norms.H;
        for (std::size_t n = 0; n < H.size() && energy == 0; ++n)
            if (std::sqrt(H[n]) > std::sqrt(H[0]) * (1 + kCriterionSlack)) energy = n;
        for (std::size_t n = 0; n < traj.norms.C.size() && C == 0; ++n)
            if (traj.norms.C[n] > traj.norms.C[0] * (1 + kCriterionSlack)) C = n;
    } catch (const Divergence&) {
        GTEST_SKIP() << "direct run diverged before the comparison window";
    }
    EXPECT_EQ(v.energy_violation, energy);
    EXPECT_EQ(v.C_violation, C);

    const auto again = evaluate_cell(rod, h, tau, d, d, false, steps);
    EXPECT_EQ(again.energy_violation, v.energy_violation);
    EXPECT_EQ(again.C_violation, v.C_violation);
    EXPECT_EQ(again.L2_violation, v.L2_violation);
}

TEST(Stability, ScanDoesNotDependOnThreadCount) {
    ScanConfig cfg;
    cfg.rod = steel_rod();
    cfg.h = integer_grid_steps(1.0, 0.018, 0.025, 3);
    for (double h : cfg.h) cfg.tau.push_back(geometric_range(0.2 * h * h, 0.8 * h * h, 3));
    cfg.steps = 400;
    cfg.threads = 1;
    const auto a = scan_stability(cfg);
    cfg.threads = 3;
    const auto b = scan_stability(cfg);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].bc_exists, b.cells[i].bc_exists);
        EXPECT_EQ(a.cells[i].energy_violation, b.cells[i].energy_violation);
        EXPECT_EQ(a.cells[i].C_violation, b.cells[i].C_violation);
        EXPECT_EQ(a.cells[i].L2_violation, b.cells[i].L2_violation);
        EXPECT_EQ(a.cells[i].h, b.cells[i].h);
        EXPECT_EQ(a.cells[i].tau, b.cells[i].tau);
    }
}

TEST(Stability, GridStepsDivideSegment) {
    const auto hs = integer_grid_steps(1.0, 0.0125, 0.03, 20);
    EXPECT_GE(hs.size(), 15u);
    for (double h : hs) {
        const double n = 1.0 / h;
        EXPECT_NEAR(n, std::round(n), 1e-9 * n);
        EXPECT_GE(h, 0.0125 * 0.95);
        EXPECT_LE(h, 0.03 * 1.05);
    }
    for (std::size_t i = 1; i < hs.size(); ++i) EXPECT_GT(hs[i], hs[i - 1]);
    const auto t = geometric_range(2e-5, 5e-4, 20);
    EXPECT_DOUBLE_EQ(t.front(), 2e-5);
    EXPECT_NEAR(t.back(), 5e-4, 1e-18);
    EXPECT_NEAR(t[1] / t[0], t[19] / t[18], 1e-12);
}
