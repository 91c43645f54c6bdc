#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rodtbc/error.hpp"
#include "rodtbc/params.hpp"

namespace rodtbc {

/// Chebyshev (max-abs) and trapezoidal L2 norms of one layer.
struct GridNorms {
    double C = 0.0;
    double L2 = 0.0;
};

inline GridNorms grid_norms(std::span<const double> u, double h) {
    GridNorms n;
    if (u.empty()) return n;
    double sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        n.C = std::max(n.C, std::abs(u[j]));
        const double w = (j == 0 || j + 1 == u.size()) ? 0.5 : 1.0;
        sum += w * u[j] * u[j];
    }
    n.L2 = std::sqrt(h * sum);
    return n;
}

/// Discrete energy at the half step between layers u_n and u_np1.
///
/// Interior density: rho (dt u)^2 + rho R^2 (dt dx u)^2 + E R^2 (dxx u)^2 with
/// central differences in x, the second x-difference averaged over both
/// layers. At the ends the x-derivatives switch to one-sided stencils: a
/// first difference for the mixed term and the 3-point stencil
/// u_0 - 2u_1 + u_2 (mirrored at the right end) for the bending term.
inline double hamiltonian_halfstep(std::span<const double> u_n, std::span<const double> u_np1,
                                   const RodModel& rod, double h, double tau) {
    const std::size_t n = u_n.size();
    if (n != u_np1.size()) throw Error("hamiltonian_halfstep: layer sizes differ");
    if (n < 3) throw Error("hamiltonian_halfstep: need at least three points");
    const double kin = rod.rho;
    const double rot = rod.rho * rod.R * rod.R;
    const double bend = rod.E * rod.R * rod.R;
    auto dt = [&](std::size_t j) { return u_np1[j] - u_n[j]; };
    auto dxx = [&](std::size_t a, std::size_t b, std::size_t c) {
        return (u_np1[a] - 2.0 * u_np1[b] + u_np1[c] + u_n[a] - 2.0 * u_n[b] + u_n[c]) / (2.0 * h * h);
    };
    auto density = [&](double vt, double vxt, double vxx) {
        return kin * vt * vt + rot * vxt * vxt + bend * vxx * vxx;
    };

    double sum = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double vt = dt(j) / tau;
        const double vxt = (dt(j + 1) - dt(j - 1)) / (2.0 * h * tau);
        sum += density(vt, vxt, dxx(j - 1, j, j + 1));
    }
    const std::size_t N = n - 1;
    const double left = density(dt(0) / tau, (dt(1) - dt(0)) / (h * tau), dxx(0, 1, 2));
    const double right = density(dt(N) / tau, (dt(N) - dt(N - 1)) / (h * tau), dxx(N, N - 1, N - 2));
    sum += 0.5 * (left + right);
    return h * sum;
}

/// Per-layer norms of a trajectory (or of its difference with a reference).
/// C and L2 have one entry per time layer t_n; H holds the half-step energy
/// between layers n and n+1 and is one entry shorter.
struct NormSeries {
    std::vector<double> t;
    std::vector<double> H;
    std::vector<double> C;
    std::vector<double> L2;

    std::size_t layers() const { return t.size(); }
};

/// Incremental builder used by the time loop.
class NormAccumulator {
public:
    NormAccumulator(const RodModel& rod, double h, double tau) : rod_(rod), h_(h), tau_(tau) {}

    void add(double t, std::span<const double> layer) {
        const auto g = grid_norms(layer, h_);
        if (!prev_.empty()) series_.H.push_back(hamiltonian_halfstep(prev_, layer, rod_, h_, tau_));
        series_.t.push_back(t);
        series_.C.push_back(g.C);
        series_.L2.push_back(g.L2);
        prev_.assign(layer.begin(), layer.end());
    }

    const NormSeries& series() const { return series_; }
    NormSeries take() { return std::move(series_); }

private:
    RodModel rod_;
    double h_, tau_;
    std::vector<double> prev_;
    NormSeries series_;
};

/// Norms of frames[n] - ref_frames[n] for every layer n, with layer times t.
inline NormSeries error_series(const std::vector<std::vector<double>>& frames,
                               const std::vector<std::vector<double>>& ref_frames,
                               std::span<const double> t, const RodModel& rod, double h, double tau) {
    if (frames.size() != ref_frames.size() || frames.size() != t.size())
        throw Error("error_series: layer counts differ (" + std::to_string(frames.size()) + " vs " +
                    std::to_string(ref_frames.size()) + ")");
    NormAccumulator acc(rod, h, tau);
    std::vector<double> diff;
    for (std::size_t n = 0; n < frames.size(); ++n) {
        if (frames[n].size() != ref_frames[n].size())
            throw Error("error_series: grid sizes differ at layer " + std::to_string(n));
        diff.resize(frames[n].size());
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = frames[n][j] - ref_frames[n][j];
        acc.add(t[n], diff);
    }
    return acc.take();
}

/// Least-squares fit of log(value) = log(c) + exponent * log(t).
struct DecayFit {
    double c = 0.0;
    double exponent = 0.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kMinDecaySamples = 20;

inline DecayFit decay_fit(std::span<const double> t, std::span<const double> value, double t_lo,
                          double t_hi) {
    if (t.size() != value.size()) throw Error("decay_fit: series lengths differ");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || !(t[i] > 0.0) || !(value[i] > 0.0)) continue;
        const double x = std::log(t[i]);
        const double y = std::log(value[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < kMinDecaySamples)
        throw Error("decay_fit: window holds " + std::to_string(n) + " samples, need at least " +
                    std::to_string(kMinDecaySamples));
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) throw Error("decay_fit: degenerate time window");
    DecayFit f;
    f.exponent = (dn * sxy - sx * sy) / denom;
    f.c = std::exp((sy - f.exponent * sx) / dn);
    f.samples = n;
    return f;
}

}  // namespace rodtbc
