#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rodtbc/params.hpp"
#include "rodtbc/series.hpp"

using namespace rodtbc;

namespace {

double max_abs(const ComplexSeries& s) {
    double m = 0.0;
    for (const auto& c : s.coeffs()) m = std::max(m, to_double(Real(abs(c))));
    return m;
}

double max_abs_diff(const ComplexSeries& a, const ComplexSeries& b) {
    const std::size_t K = std::min(a.order(), b.order());
    double m = 0.0;
    for (std::size_t i = 0; i <= K; ++i) m = std::max(m, to_double(Real(abs(a[i] - b[i]))));
    return m;
}

std::vector<SchemeCoefficients> sample_schemes() {
    return {steel_model().coeffs, scheme_coefficients(1.0, 0.5), scheme_coefficients(10.0, 3.0),
            scheme_coefficients(0.3, 0.1), scheme_coefficients(2.0, 1.3)};
}

// Large root of lambda^2 - theta lambda + 1 = 0 in double precision.
std::complex<double> large_root(std::complex<double> theta) {
    const auto d = std::sqrt(theta * theta - 4.0);
    const auto a = (theta + d) / 2.0, b = (theta - d) / 2.0;
    return std::abs(a) > std::abs(b) ? a : b;
}

}  // namespace

TEST(Series, LegendreMatchesLibrary) {
    for (double eps : {-0.9, -0.5, 0.0, 0.5, 0.9, -7.31e-7}) {
        const auto P = legendre_values<double>(eps, 100);
        for (unsigned n = 0; n <= 100; ++n) EXPECT_NEAR(P[n], std::legendre(n, eps), 1e-12) << "n=" << n << " eps=" << eps;
    }
}

TEST(Series, LegendreKnownValue) {
    const auto P = legendre_values<Real>(Real(0.5), 3);
    EXPECT_NEAR(to_double(P[3]), -0.4375, 1e-40);
    EXPECT_NEAR(to_double(P[2]), -0.125, 1e-40);
}

TEST(Series, LegendreRecurrenceInExtendedPrecision) {
    const Real eps = Real(-3) / 7;
    const auto P = legendre_values<Real>(eps, 60);
    for (std::size_t n = 1; n < 60; ++n) {
        const Real lhs = Real(n + 1) * P[n + 1];
        const Real rhs = Real(2 * n + 1) * eps * P[n] - Real(n) * P[n - 1];
        EXPECT_LT(to_double(Real(abs(lhs - rhs))), 1e-40);
    }
}

TEST(Series, LegendreRejectsOutsideInterval) {
    EXPECT_THROW(legendre_values<Real>(Real(1), 4), RegimeError);
    EXPECT_THROW(legendre_values<double>(-1.5, 4), RegimeError);
}

TEST(Series, ProductMatchesPolynomialEvaluation) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t K = 12;
    ComplexSeries a(K), b(K);
    for (std::size_t i = 0; i <= K / 2; ++i) {
        a[i] = Complex(Real(u(gen)), Real(u(gen)));
        b[i] = Complex(Real(u(gen)), Real(u(gen)));
    }
    const auto c = series_mul(a, b, K);
    for (double x : {-0.7, 0.3, 1.1}) {
        auto eval = [&](const ComplexSeries& s) {
            Complex acc(0);
            for (std::size_t i = s.order() + 1; i-- > 0;) acc = acc * Complex(Real(x)) + s[i];
            return acc;
        };
        EXPECT_LT(to_double(Real(abs(eval(c) - eval(a) * eval(b)))), 1e-40);
    }
}

TEST(Series, ProductRejectsShortOperands) {
    ComplexSeries a(3), b(5);
    EXPECT_THROW(series_mul(a, b, 4), Error);
}

TEST(Series, SquareRootSquaresBack) {
    const std::size_t K = 20;
    const ComplexSeries s(K, {Complex(0), Complex(Real(0.3), Real(-0.2)), Complex(Real(-0.1)), Complex(Real(0.05))});
    const auto r = sqrt_one_plus(s, K);
    auto one_plus = s;
    one_plus[0] += Complex(1);
    EXPECT_LT(max_abs_diff(r * r, one_plus), 1e-45);
}

TEST(Series, SquareRootRequiresVanishingConstant) {
    const ComplexSeries s(4, {Complex(1)});
    EXPECT_THROW(sqrt_one_plus(s, 4), Error);
}

TEST(Series, EtaPairSatisfiesVieta) {
    const std::size_t K = 24;
    for (const auto& sc : sample_schemes()) {
        const auto eta = eta_series(sc, K);
        // sigma(1+w^2) eta^2 + (beta(1+w^2) + gamma w) eta + (alpha - 2 sigma)(1+w^2) + delta w = 0
        const Real nu = sc.nu, mu = sc.mu;
        const Complex s(nu / 2), b(-2 * nu - mu), g(2 * mu), a(1 + 3 * nu + 2 * mu), d(-2 - 4 * mu);
        const ComplexSeries opw(K, {Complex(1), Complex(0), Complex(1)});
        const ComplexSeries lin_b = opw * b + ComplexSeries(K, {Complex(0), g});
        const ComplexSeries lin_c = opw * (a - Complex(2) * s) + ComplexSeries(K, {Complex(0), d});
        const ComplexSeries lead = opw * s;
        const auto sum = eta.eta1 + eta.eta2;
        const auto prod = eta.eta1 * eta.eta2;
        EXPECT_LT(max_abs(lead * sum + lin_b), 1e-40 * (1 + sc.nu));
        EXPECT_LT(max_abs_diff(lead * prod, lin_c), 1e-40 * (1 + sc.nu));
    }
}

TEST(Series, EtaConstantsAreConjugateInTheComplexRegime) {
    const auto eta = eta_series(steel_model().coeffs, 8);
    for (std::size_t i = 0; i <= 8; ++i) EXPECT_LT(to_double(Real(abs(eta.eta1[i] - conj(eta.eta2[i])))), 1e-45);
    const auto th = std::complex<double>(to_double(real(eta.eta1[0])), to_double(imag(eta.eta1[0])));
    EXPECT_NEAR(th.real(), 2.00058482142857142857142857143, 1e-13);
    EXPECT_NEAR(std::abs(th.imag()), 0.684000585409866108263881312257, 1e-13);
}

TEST(Series, EtaRejectsOutsideLegendreRegime) {
    EXPECT_THROW(eta_series(scheme_coefficients(1.0, 1.0), 4), RegimeError);
    EXPECT_THROW(eta_series(scheme_coefficients(1.0, 5.0), 4), RegimeError);
}

TEST(Series, LambdaRootsSolveCharacteristicPolynomial) {
    const std::size_t K = 26;
    for (const auto& sc : sample_schemes()) {
        const auto q = lambda_series(eta_series(sc, K), K);
        for (const auto* lam : {&q.lam1, &q.lam2, &q.lam3, &q.lam4}) {
            const double scale = std::max(1.0, max_abs(*lam));
            EXPECT_LT(max_abs(characteristic_residual(sc, *lam)) / std::pow(scale, 4), 1e-18 * (1 + sc.nu));
        }
    }
}

TEST(Series, LambdaPairsAreReciprocal) {
    const std::size_t K = 20;
    for (const auto& sc : sample_schemes()) {
        const auto q = lambda_series(eta_series(sc, K), K);
        const auto one = ComplexSeries::constant(K, Complex(1));
        EXPECT_LT(max_abs_diff(q.lam1 * q.lam3, one), 1e-40);
        EXPECT_LT(max_abs_diff(q.lam2 * q.lam4, one), 1e-40);
        EXPECT_LT(to_double(Real(abs(q.lam1[0]))), 1.0);
        EXPECT_GT(to_double(Real(abs(q.lam3[0]))), 1.0);
    }
}

TEST(Series, PowerSumsMatchLeadingRoots) {
    const std::size_t K = 12;
    const auto sc = steel_model().coeffs;
    const auto q = lambda_series(eta_series(sc, K), K);
    const auto ps = power_sums(q, 6, K);
    ASSERT_EQ(ps.s.size(), 7u);
    EXPECT_LT(to_double(ps.max_imag_residue), 1e-20);

    const double nu = sc.nu, mu = sc.mu;
    const std::complex<double> rad = std::sqrt(std::complex<double>(mu * mu - 2 * nu));
    const std::complex<double> theta1 = (mu + 2 * nu - rad) / nu;
    const std::complex<double> theta2 = (mu + 2 * nu + rad) / nu;
    const auto l3 = large_root(theta1), l4 = large_root(theta2);
    EXPECT_NEAR(std::abs(l3 - std::conj(l4)), 0.0, 1e-12);
    for (unsigned j = 0; j <= 6; ++j) {
        const auto p3 = std::pow(l3, static_cast<int>(j)), p4 = std::pow(l4, static_cast<int>(j));
        const auto s = (p3 + p4) / 2.0;
        const auto a = (p3 - p4) / std::complex<double>(0.0, 2.0);
        EXPECT_NEAR(to_double(ps.s[j][0]), s.real(), 1e-10 * std::abs(p3));
        EXPECT_NEAR(to_double(ps.a[j][0]), a.real(), 1e-10 * std::abs(p3));
    }
    for (std::size_t i = 0; i <= K; ++i) {
        EXPECT_EQ(to_double(ps.s[0][i]), i == 0 ? 1.0 : 0.0);
        EXPECT_EQ(to_double(ps.a[0][i]), 0.0);
    }
}

TEST(Series, OrderRule) {
    EXPECT_EQ(series_order_for(8), 24u);
    EXPECT_EQ(series_order_for(0), 8u);
}
