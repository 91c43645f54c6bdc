#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "rodtbc/error.hpp"

namespace rodtbc {

/// Physical constants of a homogeneous rod with circular cross-section.
struct RodModel {
    double rho = 0.0;  ///< density, kg/m^3
    double E = 0.0;    ///< Young's modulus, Pa
    double R = 0.0;    ///< cross-section radius, m
    double L = 0.0;    ///< segment length, m

    /// Bending coefficient C = E R^2 / rho (m^4 s^-2).
    double bending() const { return E * R * R / rho; }
    /// Rotary-inertia coefficient D = R^2 (m^2).
    double rotary() const { return R * R; }

    void validate() const {
        if (!(rho > 0.0) || !(E > 0.0) || !(R > 0.0) || !(L > 0.0))
            throw ConfigError("rod constants rho, E, R, L must be strictly positive");
        if (!std::isfinite(bending()) || !std::isfinite(rotary()))
            throw ConfigError("rod constants produce non-finite C or D");
    }

    friend bool operator==(const RodModel&, const RodModel&) = default;
};

/// Uniform space-time grid on [-L/2, L/2] x [0, T].
struct GridSpec {
    double h = 0.0;
    double tau = 0.0;
    double T = 0.0;
    std::size_t N = 0;  ///< number of intervals, L/h

    /// Number of time steps that fit in [0, T].
    std::size_t steps() const {
        return static_cast<std::size_t>(std::floor(T / tau + 1e-9));
    }
    std::size_t points() const { return N + 1; }
};

/// Relative tolerance for the "L/h is an integer" check.
inline constexpr double kGridIntegerTolerance = 1e-9;

inline GridSpec make_grid(const RodModel& rod, double h, double tau, double T) {
    if (!(h > 0.0)) throw ConfigError("grid step h must be positive");
    if (!(tau > 0.0)) throw ConfigError("time step tau must be positive");
    if (!(T >= tau)) throw ConfigError("horizon T must be at least tau");
    const double ratio = rod.L / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > kGridIntegerTolerance * ratio)
        throw ConfigError("L/h = " + std::to_string(ratio) + " is not an integer");
    return GridSpec{h, tau, T, static_cast<std::size_t>(rounded)};
}

struct Dimensionless {
    double nu = 0.0;
    double mu = 0.0;
};

/// Weights of the five-point Crank-Nicolson stencil.
struct SchemeCoefficients {
    double nu = 0.0;
    double mu = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
};

/// Flags that decide whether the characteristic-root series can be built.
struct RegimeReport {
    double epsilon = 0.0;     ///< Legendre argument mu^2 / (mu^2 - 2 nu)
    bool theta_real = false;  ///< mu^2 > 2 nu: the two eta constants are real
    bool legendre_ok = false; ///< |epsilon| < 1, i.e. mu^2 < nu
};

inline Dimensionless dimensionless_params(const RodModel& rod, const GridSpec& grid) {
    const double h2 = grid.h * grid.h;
    return {rod.E * rod.R * rod.R / rod.rho * grid.tau * grid.tau / (h2 * h2),
            rod.R * rod.R / h2};
}

inline SchemeCoefficients scheme_coefficients(double nu, double mu) {
    if (!(nu > 0.0) || !(mu >= 0.0))
        throw ConfigError("scheme coefficients need nu > 0 and mu >= 0");
    return {nu, mu, 1.0 + 3.0 * nu + 2.0 * mu, -2.0 * nu - mu, 2.0 * mu, -2.0 - 4.0 * mu,
            nu / 2.0};
}

inline SchemeCoefficients scheme_coefficients(const RodModel& rod, const GridSpec& grid) {
    const auto d = dimensionless_params(rod, grid);
    return scheme_coefficients(d.nu, d.mu);
}

/// Boundary cases mu^2 == 2 nu and mu^2 == nu are classified with strict
/// inequalities: equality yields theta_real = false / legendre_ok = false.
inline RegimeReport regime_report(double nu, double mu) {
    const double mu2 = mu * mu;
    RegimeReport r;
    r.epsilon = mu2 / (mu2 - 2.0 * nu);
    r.theta_real = mu2 > 2.0 * nu;
    r.legendre_ok = mu2 < nu;
    return r;
}

/// Time step above which the Legendre argument has modulus below one.
inline double legendre_tau_threshold(const RodModel& rod) {
    return rod.R * std::sqrt(rod.rho / rod.E);
}

/// Time step below which the eta constants are real.
inline double real_theta_tau_threshold(const RodModel& rod) {
    return rod.R * std::sqrt(rod.rho / (2.0 * rod.E));
}

/// Everything a derivation or a run needs about the model, resolved once.
struct ModelParams {
    RodModel rod;
    GridSpec grid;
    SchemeCoefficients coeffs;
    RegimeReport regime;
};

inline ModelParams make_model(const RodModel& rod, double h, double tau, double T) {
    rod.validate();
    ModelParams m;
    m.rod = rod;
    m.grid = make_grid(rod, h, tau, T);
    m.coeffs = scheme_coefficients(rod, m.grid);
    m.regime = regime_report(m.coeffs.nu, m.coeffs.mu);
    return m;
}

/// The steel rod and grid used throughout the reference experiments.
inline RodModel steel_rod() { return RodModel{7860.0, 210e9, 1e-3, 1.0}; }

inline ModelParams steel_model() { return make_model(steel_rod(), 0.02, 1.6e-4, 0.3); }

}  // namespace rodtbc
