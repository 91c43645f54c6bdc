#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rodtbc/params.hpp"

using namespace rodtbc;

namespace {

// Independent values computed with 30-digit arithmetic.
constexpr double kNu = 4.27480916030534351145038167939;
constexpr double kMu = 0.0025;
constexpr double kEps = -7.31027320114837807163798763715e-7;

}  // namespace

TEST(Params, SteelRodDimensionless) {
    const auto m = steel_model();
    EXPECT_NEAR(m.coeffs.nu, kNu, 1e-12 * kNu);
    EXPECT_NEAR(m.coeffs.mu, kMu, 1e-15);
    EXPECT_EQ(m.grid.N, 50u);
    EXPECT_EQ(m.grid.points(), 51u);
    EXPECT_EQ(m.grid.steps(), 1875u);
}

TEST(Params, SteelRodSchemeCoefficients) {
    const auto c = steel_model().coeffs;
    EXPECT_NEAR(c.alpha, 13.8294274809160305343511450382, 1e-11);
    EXPECT_NEAR(c.beta, -8.55211832061068702290076335878, 1e-11);
    EXPECT_NEAR(c.gamma, 0.005, 1e-15);
    EXPECT_NEAR(c.delta, -2.01, 1e-14);
    EXPECT_NEAR(c.sigma, 2.13740458015267175572519083969, 1e-11);
}

TEST(Params, SteelRodRegime) {
    const auto r = steel_model().regime;
    EXPECT_NEAR(r.epsilon, kEps, 1e-18);
    EXPECT_FALSE(r.theta_real);
    EXPECT_TRUE(r.legendre_ok);
}

TEST(Params, TauThresholds) {
    const auto rod = steel_rod();
    EXPECT_NEAR(legendre_tau_threshold(rod), 1.93464651625487979e-7, 1e-19);
    EXPECT_NEAR(real_theta_tau_threshold(rod), 1.36800167084275574e-7, 1e-19);
    EXPECT_NEAR(legendre_tau_threshold(rod) / real_theta_tau_threshold(rod), std::sqrt(2.0), 1e-14);
}

TEST(Params, RegimeFlagsFollowThresholds) {
    const auto rod = steel_rod();
    const double t1 = legendre_tau_threshold(rod);
    const double t2 = real_theta_tau_threshold(rod);
    auto regime_at = [&](double tau) { return make_model(rod, 0.02, tau, 1.0).regime; };
    EXPECT_TRUE(regime_at(1.05 * t1).legendre_ok);
    EXPECT_FALSE(regime_at(0.95 * t1).legendre_ok);
    EXPECT_FALSE(regime_at(1.05 * t2).theta_real);
    EXPECT_TRUE(regime_at(0.95 * t2).theta_real);
}

TEST(Params, EqualityCasesAreStrict) {
    const auto a = regime_report(1.0, 1.0);  // mu^2 == nu
    EXPECT_FALSE(a.legendre_ok);
    EXPECT_DOUBLE_EQ(a.epsilon, -1.0);
    const auto b = regime_report(2.0, 2.0);  // mu^2 == 2 nu
    EXPECT_FALSE(b.theta_real);
}

TEST(Params, UnitSymbolCase) {
    const auto m = make_model(RodModel{1.0, 1.0, 1.0, 10.0}, 1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(m.coeffs.nu, 1.0);
    EXPECT_DOUBLE_EQ(m.coeffs.mu, 1.0);
    EXPECT_DOUBLE_EQ(m.coeffs.alpha, 6.0);
    EXPECT_DOUBLE_EQ(m.coeffs.beta, -3.0);
    EXPECT_DOUBLE_EQ(m.coeffs.gamma, 2.0);
    EXPECT_DOUBLE_EQ(m.coeffs.delta, -6.0);
    EXPECT_DOUBLE_EQ(m.coeffs.sigma, 0.5);
}

TEST(Params, RejectsNonIntegerSegmentCount) {
    EXPECT_THROW(make_model(steel_rod(), 0.03, 1.6e-4, 0.3), ConfigError);
    EXPECT_NO_THROW(make_model(steel_rod(), 0.025, 1.6e-4, 0.3));
}

TEST(Params, RejectsBadConstants) {
    EXPECT_THROW(make_model(RodModel{0.0, 1.0, 1.0, 1.0}, 0.1, 0.1, 1.0), ConfigError);
    EXPECT_THROW(make_model(RodModel{1.0, -1.0, 1.0, 1.0}, 0.1, 0.1, 1.0), ConfigError);
    EXPECT_THROW(make_model(steel_rod(), -0.02, 1.6e-4, 0.3), ConfigError);
    EXPECT_THROW(make_model(steel_rod(), 0.02, 0.0, 0.3), ConfigError);
    EXPECT_THROW(make_model(steel_rod(), 0.02, 1.0, 0.3), ConfigError);
}

TEST(Params, CoefficientIdentitiesHoldForRandomParameters) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int k = 0; k < 200; ++k) {
        const double nu = u(gen), mu = u(gen);
        const auto c = scheme_coefficients(nu, mu);
        // A constant layer is a fixed point of the interior stencil.
        EXPECT_NEAR(2 * c.sigma + 2 * c.beta + c.alpha, 1.0, 1e-12 * (1 + nu));
        EXPECT_NEAR(2 * c.gamma + c.delta, -2.0, 1e-12 * (1 + mu));
        const auto r = regime_report(nu, mu);
        EXPECT_EQ(r.legendre_ok, std::abs(r.epsilon) < 1.0);
    }
}
