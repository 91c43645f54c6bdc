#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "rodtbc/linalg.hpp"
#include "rodtbc/precision.hpp"

using namespace rodtbc;

namespace {

std::vector<double> dense_apply(const std::vector<std::vector<double>>& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

}  // namespace

TEST(Linalg, FullPivotSolvesRandomSystem) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 12;
    DenseMatrix<Real> a(n);
    std::vector<Real> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(gen);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = u(gen);
    }
    const auto b = a.apply(x);
    const FullPivotLU<Real> lu(a);
    ASSERT_FALSE(lu.singular());
    const auto y = lu.solve(b);
    for (std::size_t i = 0; i < n; ++i) EXPECT_LT(to_double(Real(abs(y[i] - x[i]))), 1e-40);
}

TEST(Linalg, FullPivotDetectsSingularity) {
    DenseMatrix<Real> a(3);
    for (std::size_t j = 0; j < 3; ++j) {
        a(0, j) = Real(j + 1);
        a(1, j) = Real(2 * (j + 1));
        a(2, j) = Real(j * j);
    }
    const FullPivotLU<Real> lu(a);
    EXPECT_TRUE(lu.singular());
    EXPECT_THROW(lu.solve({Real(1), Real(1), Real(1)}), SingularSystem);
}

TEST(Linalg, FullPivotInverseNormOfDiagonal) {
    DenseMatrix<Real> a(3);
    a(0, 0) = 2;
    a(1, 1) = Real(1) / 4;
    a(2, 2) = -8;
    const FullPivotLU<Real> lu(a);
    EXPECT_NEAR(to_double(lu.inverse_norm1()), 4.0, 1e-40);
    EXPECT_NEAR(to_double(a.norm1()), 8.0, 1e-40);
}

TEST(Linalg, BandedMatchesDenseSolve) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 30, kl = 3, ku = 3;
    BandedLU band(n, kl, ku);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i >= kl ? i - kl : 0); j <= std::min(n - 1, i + ku); ++j) {
            const double v = u(gen) + (i == j ? 0.5 : 0.0);
            band.set(i, j, v);
            dense[i][j] = v;
        }
    std::vector<double> x(n);
    for (auto& v : x) v = u(gen);
    auto b = dense_apply(dense, x);
    ASSERT_TRUE(band.factor());
    band.solve(b);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(b[i], x[i], 1e-10);
}

TEST(Linalg, BandedRejectsEntriesOutsideBand) {
    BandedLU band(6, 1, 2);
    EXPECT_THROW(band.set(4, 1, 1.0), Error);
    EXPECT_THROW(band.set(0, 4, 1.0), Error);
    EXPECT_NO_THROW(band.set(0, 2, 1.0));
}

TEST(Linalg, BandedReportsZeroPivot) {
    BandedLU band(3, 1, 1);
    band.set(0, 0, 1.0);
    band.set(1, 0, 1.0);
    band.set(0, 1, 1.0);
    band.set(1, 1, 1.0);
    band.set(2, 2, 1.0);
    EXPECT_FALSE(band.factor());
    std::vector<double> b(3, 1.0);
    EXPECT_THROW(band.solve(b), SingularSystem);
}

TEST(Linalg, TridiagonalMatchesKnownSolution) {
    const std::size_t n = 8;
    std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.0), x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.3 * static_cast<double>(i)) + 1.0;
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = di[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i + 1 < n ? up[i] * x[i + 1] : 0.0);
    const auto y = solve_tridiagonal(lo, di, up, rhs);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-14);
}

TEST(Linalg, TridiagonalZeroPivot) {
    std::vector<double> lo{0, 1}, di{0, 1}, up{1, 0}, rhs{1, 1};
    EXPECT_THROW(solve_tridiagonal(lo, di, up, rhs), SingularSystem);
}
