#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rodtbc/error.hpp"
#include "rodtbc/linalg.hpp"
#include "rodtbc/params.hpp"
#include "rodtbc/precision.hpp"
#include "rodtbc/series.hpp"

namespace rodtbc {

/// Degrees of the four symbol polynomials <P, Q, R, S> of one condition.
struct DegreeSet {
    std::size_t dP = 0, dQ = 0, dR = 0, dS = 0;

    std::array<std::size_t, 4> as_array() const { return {dP, dQ, dR, dS}; }
    std::size_t max_degree() const { return std::max({dP, dQ, dR, dS}); }
    /// Number of unknown polynomial coefficients.
    std::size_t unknowns() const { return dP + dQ + dR + dS + 4; }

    /// Matching order K such that M = 2K + 2 (or 2K + 3 with the constant-solution row).
    std::size_t smallness_order(bool const_constraint) const {
        const std::size_t M = unknowns();
        const std::size_t extra = const_constraint ? 3 : 2;
        const bool parity_ok = const_constraint ? (M % 2 == 1) : (M % 2 == 0);
        if (!parity_ok)
            throw ConfigError("degree set " + to_string() + " gives M = " + std::to_string(M) +
                              " unknowns; " +
                              (const_constraint ? "an odd M is required with const_constraint"
                                                : "an even M is required without const_constraint"));
        return (M - extra) / 2;
    }

    std::string to_string() const {
        return "<" + std::to_string(dP) + "," + std::to_string(dQ) + "," + std::to_string(dR) +
               "," + std::to_string(dS) + ">";
    }

    friend bool operator==(const DegreeSet&, const DegreeSet&) = default;
};

enum class Edge { left, right };

/// Time-convolution weights p_kj, q_kj, r_kj, s_kj of one boundary condition.
struct ConditionCoefficients {
    std::vector<double> p, q, r, s;

    const std::vector<double>& poly(std::size_t i) const {
        switch (i) {
            case 0: return p;
            case 1: return q;
            case 2: return r;
            default: return s;
        }
    }
    std::size_t max_degree() const {
        return std::max({p.size(), q.size(), r.size(), s.size()}) - 1;
    }
    double total() const {
        double t = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (double c : poly(i)) t += c;
        return t;
    }
    friend bool operator==(const ConditionCoefficients&, const ConditionCoefficients&) = default;
};

struct DerivationReport {
    std::array<double, 2> condition_number{};   ///< 1-norm condition number per k-system
    std::array<double, 2> residual_norm{};      ///< max |A x - b| in extended precision
    std::array<std::size_t, 2> achieved_order{}; ///< leading vanishing coefficients of the matching series
    double imag_residue = 0.0;                  ///< reality check of the power sums
};

/// Boundary operator for one edge: conditions k = 1 (solves for the edge
/// value) and k = 2 (solves for the pre-edge value).
struct BoundaryOperator {
    std::array<ConditionCoefficients, 2> cond;
    Edge edge = Edge::left;
    std::array<std::size_t, 2> smallness{};
    DegreeSet degrees[2];
    bool const_constraint = false;
    DerivationReport report;

    std::size_t max_degree() const {
        return std::max(cond[0].max_degree(), cond[1].max_degree());
    }
};

inline constexpr double kSingularConditionNumber = 1e18;
inline constexpr double kSystemResidualTolerance = 1e-20;
inline constexpr double kMatchingTolerance = 1e-18;

struct LinearSystem {
    DenseMatrix<Real> matrix;
    std::vector<Real> rhs;
    std::size_t K = 0;
};

/// Dense system for condition k (1 or 2). Unknowns are ordered
/// p_0..p_dP, q_0..q_dQ, r_0..r_dR, s_0..s_dS. Rows: w^m coefficients of
/// P + Q s1 + R s2 + S s3 and of Q a1 + R a2 + S a3 for m < K, the two
/// normalization rows, and optionally P(1)+Q(1)+R(1)+S(1) = 0.
inline LinearSystem assemble_system(const PowerSums& ps, const DegreeSet& degrees, int k,
                                    bool const_constraint) {
    if (k != 1 && k != 2) throw ConfigError("condition index k must be 1 or 2");
    const std::size_t K = degrees.smallness_order(const_constraint);
    const std::size_t M = degrees.unknowns();
    if (ps.s.size() < 4 || ps.s[0].order() + 1 < K)
        throw Error("assemble_system: power sums too short for K = " + std::to_string(K));

    const auto deg = degrees.as_array();
    std::array<std::size_t, 4> offset{};
    for (std::size_t i = 1; i < 4; ++i) offset[i] = offset[i - 1] + deg[i - 1] + 1;

    LinearSystem sys{DenseMatrix<Real>(M), std::vector<Real>(M, Real(0)), K};
    std::size_t row = 0;
    for (std::size_t m = 0; m < K; ++m, ++row)
        for (std::size_t poly = 0; poly < 4; ++poly)
            for (std::size_t j = 0; j <= std::min(deg[poly], m); ++j)
                sys.matrix(row, offset[poly] + j) += ps.s[poly][m - j];
    for (std::size_t m = 0; m < K; ++m, ++row)
        for (std::size_t poly = 1; poly < 4; ++poly)
            for (std::size_t j = 0; j <= std::min(deg[poly], m); ++j)
                sys.matrix(row, offset[poly] + j) += ps.a[poly][m - j];
    sys.matrix(row, offset[0]) = 1;
    sys.rhs[row++] = k == 1 ? 1 : 0;
    sys.matrix(row, offset[1]) = 1;
    sys.rhs[row++] = k == 1 ? 0 : 1;
    if (const_constraint) {
        for (std::size_t j = 0; j < M; ++j) sys.matrix(row, j) = 1;
        ++row;
    }
    return sys;
}

namespace detail {

inline std::array<RealSeries, 2> matching_series(const PowerSums& ps, const DegreeSet& degrees,
                                                 const std::vector<Real>& x, std::size_t K) {
    const auto deg = degrees.as_array();
    std::array<RealSeries, 2> out{RealSeries(K), RealSeries(K)};
    std::size_t off = 0;
    for (std::size_t poly = 0; poly < 4; ++poly) {
        for (std::size_t j = 0; j <= deg[poly]; ++j)
            for (std::size_t m = j; m <= K; ++m) {
                out[0][m] += x[off + j] * ps.s[poly][m - j];
                if (poly > 0) out[1][m] += x[off + j] * ps.a[poly][m - j];
            }
        off += deg[poly] + 1;
    }
    return out;
}

}  // namespace detail

/// Symbols of both matching residuals for solved coefficients (tests and reports).
inline std::array<RealSeries, 2> matching_residual(const PowerSums& ps, const DegreeSet& degrees,
                                                   const ConditionCoefficients& c, std::size_t K) {
    std::vector<Real> x;
    for (std::size_t i = 0; i < 4; ++i)
        for (double v : c.poly(i)) x.emplace_back(v);
    return detail::matching_series(ps, degrees, x, K);
}

struct SolvedCondition {
    std::vector<Real> x;
    double condition_number = 0;
    double residual = 0;
    std::size_t achieved_order = 0;
};

inline SolvedCondition solve_condition(const PowerSums& ps, const DegreeSet& degrees, int k,
                                       bool const_constraint) {
    using std::abs;
    const auto sys = assemble_system(ps, degrees, k, const_constraint);
    const FullPivotLU<Real> lu(sys.matrix);
    if (lu.singular())
        throw SingularSystem("ADTBC system k=" + std::to_string(k) + " for degrees " +
                             degrees.to_string() + " is singular");
    const Real cond = sys.matrix.norm1() * lu.inverse_norm1();
    if (cond > Real(kSingularConditionNumber))
        throw SingularSystem("ADTBC system k=" + std::to_string(k) + " for degrees " +
                             degrees.to_string() + " has condition number " +
                             std::to_string(to_double(cond)));

    SolvedCondition out;
    out.x = lu.solve(sys.rhs);
    out.condition_number = to_double(cond);
    const auto Ax = sys.matrix.apply(out.x);
    Real res = 0;
    for (std::size_t i = 0; i < Ax.size(); ++i) res = std::max(res, Real(abs(Ax[i] - sys.rhs[i])));
    out.residual = to_double(res);
    if (res > Real(kSystemResidualTolerance))
        throw SingularSystem("ADTBC system k=" + std::to_string(k) + " residual blow-up");

    const std::size_t Kser = ps.s[0].order();
    const auto match = detail::matching_series(ps, degrees, out.x, Kser);
    std::size_t achieved = 0;
    while (achieved <= Kser && abs(match[0][achieved]) < Real(kMatchingTolerance) &&
           abs(match[1][achieved]) < Real(kMatchingTolerance))
        ++achieved;
    out.achieved_order = achieved;
    return out;
}

inline ConditionCoefficients to_coefficients(const std::vector<Real>& x, const DegreeSet& degrees) {
    ConditionCoefficients c;
    std::size_t off = 0;
    const auto deg = degrees.as_array();
    std::vector<double>* dst[4] = {&c.p, &c.q, &c.r, &c.s};
    for (std::size_t poly = 0; poly < 4; ++poly) {
        for (std::size_t j = 0; j <= deg[poly]; ++j) dst[poly]->push_back(to_double(x[off + j]));
        off += deg[poly] + 1;
    }
    return c;
}

/// Power sums for the growing roots at the resolution required by the degree sets.
inline PowerSums growing_root_power_sums(const SchemeCoefficients& sc, std::size_t max_degree,
                                         double* imag_residue = nullptr) {
    const std::size_t K = series_order_for(max_degree);
    const auto eta = eta_series(sc, K);
    const auto lam = lambda_series(eta, K);
    auto ps = power_sums(lam, 3, K);
    if (imag_residue) *imag_residue = to_double(ps.max_imag_residue);
    return ps;
}

/// Left-edge ADTBC for degree sets d1 (k = 1) and d2 (k = 2).
inline BoundaryOperator derive_adtbc(const SchemeCoefficients& sc, const DegreeSet& d1,
                                     const DegreeSet& d2, bool const_constraint) {
    const auto regime = regime_report(sc.nu, sc.mu);
    if (!regime.legendre_ok)
        throw RegimeError("ADTBC derivation needs mu^2 < nu (Legendre argument inside (-1, 1))");
    // validate parity before the expensive series work
    d1.smallness_order(const_constraint);
    d2.smallness_order(const_constraint);

    double imag = 0;
    const auto ps = growing_root_power_sums(sc, std::max(d1.max_degree(), d2.max_degree()), &imag);

    BoundaryOperator op;
    op.edge = Edge::left;
    op.const_constraint = const_constraint;
    op.degrees[0] = d1;
    op.degrees[1] = d2;
    op.report.imag_residue = imag;
    const DegreeSet* ds[2] = {&d1, &d2};
    for (int k = 1; k <= 2; ++k) {
        const auto solved = solve_condition(ps, *ds[k - 1], k, const_constraint);
        op.cond[k - 1] = to_coefficients(solved.x, *ds[k - 1]);
        op.smallness[k - 1] = ds[k - 1]->smallness_order(const_constraint);
        op.report.condition_number[k - 1] = solved.condition_number;
        op.report.residual_norm[k - 1] = solved.residual;
        op.report.achieved_order[k - 1] = solved.achieved_order;
    }
    // normalization holds exactly after rounding
    op.cond[0].p[0] = 1.0;
    op.cond[0].q[0] = 0.0;
    op.cond[1].p[0] = 0.0;
    op.cond[1].q[0] = 1.0;
    return op;
}

inline BoundaryOperator derive_adtbc(const SchemeCoefficients& sc, const DegreeSet& d,
                                     bool const_constraint) {
    return derive_adtbc(sc, d, d, const_constraint);
}

/// The right edge uses the same weights on the mirrored indices N, N-1, N-2, N-3.
inline BoundaryOperator mirror_right_edge(const BoundaryOperator& op) {
    BoundaryOperator out = op;
    out.edge = op.edge == Edge::left ? Edge::right : Edge::left;
    return out;
}

/// Grid index touched by stencil position i (0..3) on the operator's edge.
inline std::size_t stencil_index(Edge edge, std::size_t i, std::size_t N) {
    return edge == Edge::left ? i : N - i;
}

/// CSV with rows w^0..w^max and columns P1 Q1 R1 S1 P2 Q2 R2 S2; cells past a
/// polynomial's degree are left blank. decimals < 0 writes 17 significant digits.
inline void write_coefficient_table(std::ostream& os, const BoundaryOperator& op, int decimals) {
    os << "power,P1,Q1,R1,S1,P2,Q2,R2,S2\n";
    const std::size_t rows = op.max_degree() + 1;
    for (std::size_t j = 0; j < rows; ++j) {
        os << j;
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t i = 0; i < 4; ++i) {
                os << ',';
                const auto& poly = op.cond[k].poly(i);
                if (j >= poly.size()) continue;
                std::ostringstream cell;
                if (decimals >= 0)
                    cell << std::fixed << std::setprecision(decimals) << poly[j];
                else
                    cell << std::setprecision(17) << poly[j];
                std::string s = cell.str();
                if (s == "-0.000000" || s == "-0") s.erase(0, 1);
                os << s;
            }
        os << '\n';
    }
}

}  // namespace rodtbc
