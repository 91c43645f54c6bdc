#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "rodtbc/linalg.hpp"
#include "rodtbc/params.hpp"

namespace rodtbc {

using Profile = std::function<double(double)>;

/// First two time layers plus the second time derivative used to build them.
struct InitialData {
    std::vector<double> u0;
    std::vector<double> u1;
    std::vector<double> U2;
};

/// Coefficients of a U2(j-1) + U2(j) + a U2(j+1) = p f(j-2) + q f(j-1) + r f(j) + q f(j+1) + p f(j+2),
/// the compact approximation of (D d^2/dx^2 - 1) U2 = C f.
struct CompactStencil {
    double a, p, q, r;
};

inline CompactStencil compact_stencil(double C, double D, double h) {
    const double h2 = h * h;
    const double s = h2 * (3.0 * D + h2);
    return {(h2 - 6.0 * D) / (12.0 * D + 4.0 * h2), -3.0 * C / (2.0 * s), 6.0 * C / s, -9.0 * C / s};
}

/// Solves the compact system for U2 on x_j = x_left + j h (j = 0..N) with the
/// exponential-decay closures U2(x_0) = e^{-h/sqrt D} U2(x_1) and its mirror.
/// U0 is evaluated two steps past each end of the grid.
inline std::vector<double> solve_second_derivative(const Profile& U0, const RodModel& rod, double h,
                                                   double x_left, std::size_t N) {
    const auto st = compact_stencil(rod.bending(), rod.rotary(), h);
    const double decay = std::exp(-h / std::sqrt(rod.rotary()));
    const std::size_t n = N + 1;
    std::vector<double> lower(n, st.a), diag(n, 1.0), upper(n, st.a), rhs(n, 0.0);
    auto f = [&](long j) { return U0(x_left + static_cast<double>(j) * h); };
    for (std::size_t j = 1; j < N; ++j) {
        const long jj = static_cast<long>(j);
        rhs[j] = st.p * (f(jj - 2) + f(jj + 2)) + st.q * (f(jj - 1) + f(jj + 1)) + st.r * f(jj);
    }
    lower[0] = 0.0;
    upper[0] = -decay;
    lower[N] = -decay;
    upper[N] = 0.0;
    return solve_tridiagonal(lower, diag, upper, rhs);
}

/// u0 = U0, u1 = U0 + tau U1 + tau^2/2 U2 (third-order accurate in tau).
inline InitialData build_initial_data(const Profile& U0, const Profile& U1, const RodModel& rod,
                                      double h, double tau, double x_left, std::size_t N) {
    InitialData d;
    d.U2 = solve_second_derivative(U0, rod, h, x_left, N);
    d.u0.resize(N + 1);
    d.u1.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        const double x = x_left + static_cast<double>(j) * h;
        d.u0[j] = U0(x);
        d.u1[j] = d.u0[j] + tau * U1(x) + 0.5 * tau * tau * d.U2[j];
    }
    return d;
}

/// Initial displacement profiles. Each is supported on [-L/2, L/2] and zero outside.
enum class InitialProfile { odd_gaussian, shifted_gaussian, zero };

/// (x - shift) / sqrt(0.02 pi) * exp(-(x - shift)^2 / 0.02), scaled.
inline Profile gaussian_derivative_profile(double L, double shift = 0.0, double scale = 1.0) {
    return [=](double x) {
        if (std::abs(x) > 0.5 * L * (1.0 + 1e-12)) return 0.0;
        const double y = x - shift;
        return scale * y / std::sqrt(std::numbers::pi * 0.02) * std::exp(-y * y / 0.02);
    };
}

inline Profile make_profile(InitialProfile kind, double L, double scale = 1.0) {
    switch (kind) {
        case InitialProfile::odd_gaussian: return gaussian_derivative_profile(L, 0.0, scale);
        case InitialProfile::shifted_gaussian: return gaussian_derivative_profile(L, 0.1, scale);
        case InitialProfile::zero: break;
    }
    return [](double) { return 0.0; };
}

inline Profile zero_profile() {
    return [](double) { return 0.0; };
}

}  // namespace rodtbc
