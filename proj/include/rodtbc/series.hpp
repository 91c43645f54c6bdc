#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "rodtbc/error.hpp"
#include "rodtbc/params.hpp"
#include "rodtbc/precision.hpp"

namespace rodtbc {

/// Taylor expansion c_0 + c_1 w + ... + c_K w^K around w = 0.
///
/// Arithmetic is truncated: no operation ever produces or reads a
/// coefficient past the order of its operands.
template <class T>
class TruncatedSeries {
public:
    TruncatedSeries() = default;
    explicit TruncatedSeries(std::size_t order) : coeffs_(order + 1, T(0)) {}
    TruncatedSeries(std::size_t order, std::initializer_list<T> head) : coeffs_(order + 1, T(0)) {
        std::size_t i = 0;
        for (const auto& c : head) {
            if (i > order) break;
            coeffs_[i++] = c;
        }
    }

    static TruncatedSeries constant(std::size_t order, const T& c) {
        TruncatedSeries s(order);
        s.coeffs_[0] = c;
        return s;
    }

    std::size_t order() const { return coeffs_.size() - 1; }
    const T& operator[](std::size_t i) const { return coeffs_[i]; }
    T& operator[](std::size_t i) { return coeffs_[i]; }
    const std::vector<T>& coeffs() const { return coeffs_; }

    /// Copy truncated (or zero-padded) to a new order.
    TruncatedSeries truncated(std::size_t order) const {
        TruncatedSeries s(order);
        const std::size_t n = std::min(order, this->order());
        for (std::size_t i = 0; i <= n; ++i) s.coeffs_[i] = coeffs_[i];
        return s;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        const std::size_t n = std::min(order(), o.order());
        coeffs_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        const std::size_t n = std::min(order(), o.order());
        coeffs_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    TruncatedSeries& operator*=(const T& c) {
        for (auto& x : coeffs_) x *= c;
        return *this;
    }

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, const T& c) { return a *= c; }
    friend TruncatedSeries operator*(const T& c, TruncatedSeries a) { return a *= c; }

private:
    std::vector<T> coeffs_{T(0)};
};

using ComplexSeries = TruncatedSeries<Complex>;
using RealSeries = TruncatedSeries<Real>;

/// Cauchy product truncated at order K. Both operands must reach order K.
template <class T>
TruncatedSeries<T> series_mul(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b,
                              std::size_t K) {
    if (a.order() < K || b.order() < K)
        throw Error("series_mul: operand order below requested truncation");
    TruncatedSeries<T> c(K);
    for (std::size_t n = 0; n <= K; ++n) {
        T acc(0);
        for (std::size_t i = 0; i <= n; ++i) acc += a[i] * b[n - i];
        c[n] = acc;
    }
    return c;
}

template <class T>
TruncatedSeries<T> operator*(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b) {
    return series_mul(a, b, std::min(a.order(), b.order()));
}

template <class T>
TruncatedSeries<T> series_pow(const TruncatedSeries<T>& a, unsigned p) {
    auto r = TruncatedSeries<T>::constant(a.order(), T(1));
    for (unsigned i = 0; i < p; ++i) r = r * a;
    return r;
}

/// sqrt(1 + s) for a series with s(0) = 0, by composing the binomial series
/// sum_n (-1)^n (2n)! / ((1 - 2n) (n!)^2 4^n) s^n.
template <class T>
TruncatedSeries<T> sqrt_one_plus(const TruncatedSeries<T>& s, std::size_t K) {
    if (s.order() < K) throw Error("sqrt_one_plus: operand order below requested truncation");
    if (s[0] != T(0)) throw Error("sqrt_one_plus: constant term of the argument must vanish");
    const auto x = s.truncated(K);
    auto result = TruncatedSeries<T>::constant(K, T(1));
    auto power = TruncatedSeries<T>::constant(K, T(1));
    // binomial(1/2, n) via c_n = c_{n-1} * (1/2 - (n-1)) / n
    Real c = 1;
    for (std::size_t n = 1; n <= K; ++n) {
        c *= (Real(1) / 2 - Real(n - 1)) / Real(n);
        power = series_mul(power, x, K);
        result += power * T(c);
    }
    return result;
}

/// Legendre polynomials P_0(eps) .. P_nmax(eps) through the trigonometric
/// expansion in cos(k alpha), alpha = arccos(eps):
///
///   P_n = (2n-1)!! / (2^(n-1) n!) * sum_k c_k cos((n - 2k) alpha),
///   c_0 = 1, c_k = c_{k-1} (2k-1)/k * (n-k+1)/(2n-2k+1),
///
/// with the final cos(0) term halved when n is even. Every term is
/// positive, so the sum is free of the cancellation that hurts the
/// three-term recurrence at high degree.
template <class R = Real>
std::vector<R> legendre_values(const R& eps, std::size_t n_max) {
    using std::abs;
    using std::acos;
    using std::cos;
    if (!(abs(eps) < R(1))) throw RegimeError("legendre_values: |eps| must be below 1");
    const R alpha = acos(eps);
    std::vector<R> cosk(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) cosk[k] = cos(R(k) * alpha);

    std::vector<R> P(n_max + 1);
    P[0] = 1;
    R lead = 2;  // (2n-1)!! / (2^(n-1) n!) at n = 0
    for (std::size_t n = 1; n <= n_max; ++n) {
        lead *= R(2 * n - 1) / R(2 * n);
        R c = 1;
        R sum = cosk[n];
        for (std::size_t k = 1; 2 * k <= n; ++k) {
            c *= R(2 * k - 1) / R(k) * R(n - k + 1) / R(2 * n - 2 * k + 1);
            const R term = c * cosk[n - 2 * k];
            sum += (2 * k == n) ? term / 2 : term;
        }
        P[n] = lead * sum;
    }
    return P;
}

/// The two roots of the quadratic for eta = lambda + 1/lambda as series in w.
struct EtaPair {
    ComplexSeries eta1;
    ComplexSeries eta2;
};

/// Expansions of eta_1, eta_2 at w = 0 via the Legendre generating function.
/// For mu^2 < 2 nu the prefactor sqrt(mu^2 - 2 nu) is the principal root and
/// the pair is complex conjugate.
inline EtaPair eta_series(const SchemeCoefficients& sc, std::size_t K) {
    const auto regime = regime_report(sc.nu, sc.mu);
    if (!regime.legendre_ok)
        throw RegimeError("eta_series: Legendre argument |mu^2/(mu^2-2nu)| >= 1 (need mu^2 < nu)");

    const Real nu = sc.nu;
    const Real mu = sc.mu;
    const Real radicand = mu * mu - 2 * nu;
    const Real eps = mu * mu / radicand;
    const Complex root = sqrt(Complex(radicand));

    const auto P = legendre_values<Real>(eps, K);
    ComplexSeries legendre(K);
    for (std::size_t n = 0; n <= K; ++n) legendre[n] = Complex(P[n]);

    // sqrt(w^2 - 2 eps w + 1) = (w^2 - 2 eps w + 1) * sum P_n w^n, times (1 - w)
    const ComplexSeries quad(K, {Complex(1), Complex(-2 * eps), Complex(1)});
    const ComplexSeries one_minus(K, {Complex(1), Complex(-1)});
    const ComplexSeries radical = series_mul(series_mul(one_minus, quad, K), legendre, K) * root;

    const ComplexSeries base(K, {Complex(mu + 2 * nu), Complex(-2 * mu), Complex(mu + 2 * nu)});
    ComplexSeries geometric(K);  // 1 / (1 + w^2)
    for (std::size_t i = 0; i <= K; i += 2) geometric[i] = Complex((i / 2) % 2 == 0 ? 1 : -1);

    const Complex inv_nu = Complex(1 / nu);
    return {series_mul(geometric, base - radical, K) * inv_nu,
            series_mul(geometric, base + radical, K) * inv_nu};
}

/// Characteristic roots as series; lam1, lam2 have modulus below one at w = 0.
struct LambdaQuartet {
    ComplexSeries lam1, lam2, lam3, lam4;
    Complex theta1, theta2;
};

inline constexpr double kDegenerateThetaThreshold = 1e-12;

namespace detail {

// Roots of lambda^2 - eta lambda + 1 = 0 as series; returns {small, large}.
inline std::pair<ComplexSeries, ComplexSeries> split_roots(const ComplexSeries& eta, std::size_t K) {
    const Complex theta = eta[0];
    if (abs(theta - Complex(2)) < Real(kDegenerateThetaThreshold) ||
        abs(theta + Complex(2)) < Real(kDegenerateThetaThreshold))
        throw RegimeError("lambda_series: eta(0) is within 1e-12 of +-2 (characteristic boundary)");

    ComplexSeries r = eta.truncated(K);
    r[0] = Complex(0);
    const Complex prefactor = sqrt(theta * theta / Complex(4) - Complex(1));
    const ComplexSeries factor =
        series_mul(sqrt_one_plus(r * (Complex(1) / (theta + Complex(2))), K),
                   sqrt_one_plus(r * (Complex(1) / (theta - Complex(2))), K), K);
    const ComplexSeries half_eta = eta.truncated(K) * Complex(Real(1) / 2);
    const ComplexSeries shift = factor * prefactor;
    ComplexSeries plus = half_eta + shift;
    ComplexSeries minus = half_eta - shift;
    if (abs(plus[0]) < abs(minus[0])) std::swap(plus, minus);
    return {std::move(minus), std::move(plus)};
}

}  // namespace detail

inline LambdaQuartet lambda_series(const EtaPair& eta, std::size_t K) {
    auto [l1, l3] = detail::split_roots(eta.eta1, K);
    auto [l2, l4] = detail::split_roots(eta.eta2, K);
    return {std::move(l1), std::move(l2), std::move(l3), std::move(l4), eta.eta1[0], eta.eta2[0]};
}

/// s_j = (lam3^j + lam4^j)/2 and a_j = (lam3^j - lam4^j)/(2i), j = 0..max_power.
struct PowerSums {
    std::vector<RealSeries> s;
    std::vector<RealSeries> a;
    Real max_imag_residue = 0;
};

inline constexpr double kConjugacyTolerance = 1e-18;
inline constexpr double kRealityTolerance = 1e-20;

inline Real series_scale(const ComplexSeries& x) {
    Real m = 0;
    for (const auto& c : x.coeffs()) m = std::max(m, Real(abs(c)));
    return m;
}

inline PowerSums power_sums(const LambdaQuartet& q, std::size_t max_power, std::size_t K) {
    const ComplexSeries l3 = q.lam3.truncated(K);
    const ComplexSeries l4 = q.lam4.truncated(K);
    const Real scale = std::max(Real(1), series_scale(l3));
    for (std::size_t i = 0; i <= K; ++i) {
        if (abs(l3[i] - conj(l4[i])) > Real(kConjugacyTolerance) * scale)
            throw RegimeError("power_sums: lambda_3 and lambda_4 are not complex conjugate at w^" +
                              std::to_string(i));
    }

    PowerSums ps;
    auto p3 = ComplexSeries::constant(K, Complex(1));
    auto p4 = ComplexSeries::constant(K, Complex(1));
    const Complex half(Real(1) / 2);
    const Complex half_over_i(Real(0), Real(-1) / 2);  // 1/(2i)
    for (std::size_t j = 0; j <= max_power; ++j) {
        if (j > 0) {
            p3 = series_mul(p3, l3, K);
            p4 = series_mul(p4, l4, K);
        }
        const ComplexSeries sym = (p3 + p4) * half;
        const ComplexSeries anti = (p3 - p4) * half_over_i;
        const Real scale_j = std::max(Real(1), std::max(series_scale(sym), series_scale(anti)));
        RealSeries s(K), a(K);
        for (std::size_t i = 0; i <= K; ++i) {
            s[i] = real(sym[i]);
            a[i] = real(anti[i]);
            ps.max_imag_residue =
                std::max(ps.max_imag_residue, Real(std::max(abs(imag(sym[i])), abs(imag(anti[i]))) / scale_j));
        }
        ps.s.push_back(std::move(s));
        ps.a.push_back(std::move(a));
    }
    if (ps.max_imag_residue > Real(kRealityTolerance))
        throw RegimeError("power_sums: symmetric combinations are not real");
    return ps;
}

/// Left side of the characteristic polynomial evaluated on a root series,
/// with the stencil weights rebuilt from nu and mu in extended precision.
inline ComplexSeries characteristic_residual(const SchemeCoefficients& sc, const ComplexSeries& lam) {
    const std::size_t K = lam.order();
    const Real nu = sc.nu;
    const Real mu = sc.mu;
    const ComplexSeries opw(K, {Complex(1), Complex(0), Complex(1)});  // 1 + w^2
    const ComplexSeries c4 = opw * Complex(nu / 2);
    ComplexSeries c3 = opw * Complex(-2 * nu - mu);
    ComplexSeries c2 = opw * Complex(1 + 3 * nu + 2 * mu);
    if (K >= 1) {
        c3[1] += Complex(2 * mu);
        c2[1] += Complex(-2 - 4 * mu);
    }
    const auto l2 = lam * lam;
    const auto l3 = l2 * lam;
    const auto l4 = l3 * lam;
    const auto one = ComplexSeries::constant(K, Complex(1));
    return c4 * (l4 + one) + c3 * (l3 + lam) + c2 * l2;
}

/// Series truncation order used for a degree set of maximal degree d.
inline std::size_t series_order_for(std::size_t max_degree) { return 2 * max_degree + 8; }

}  // namespace rodtbc
