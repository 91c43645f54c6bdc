#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rodtbc/adtbc.hpp"
#include "rodtbc/diagnostics.hpp"
#include "rodtbc/error.hpp"
#include "rodtbc/initial_data.hpp"
#include "rodtbc/linalg.hpp"
#include "rodtbc/params.hpp"

namespace rodtbc {

enum class BcKind { adtbc, dirichlet_neumann, dirichlet_moment, free_free };

inline std::string_view to_string(BcKind k) {
    switch (k) {
        case BcKind::adtbc: return "adtbc";
        case BcKind::dirichlet_neumann: return "dirichlet_neumann";
        case BcKind::dirichlet_moment: return "dirichlet_moment";
        case BcKind::free_free: return "free_free";
    }
    return "?";
}

inline BcKind parse_bc_kind(std::string_view s) {
    for (auto k : {BcKind::adtbc, BcKind::dirichlet_neumann, BcKind::dirichlet_moment, BcKind::free_free})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown bc '" + std::string(s) +
                      "' (expected adtbc | dirichlet_neumann | dirichlet_moment | free_free)");
}

/// Boundary rows of the closed system; both ADTBC edges when kind == adtbc.
struct BoundaryTreatment {
    BcKind kind = BcKind::dirichlet_neumann;
    std::optional<BoundaryOperator> left;
    std::optional<BoundaryOperator> right;

    static BoundaryTreatment usual(BcKind kind) {
        if (kind == BcKind::adtbc) throw ConfigError("usual(): adtbc needs a derived operator");
        return {kind, std::nullopt, std::nullopt};
    }
    static BoundaryTreatment transparent(const BoundaryOperator& left_edge) {
        auto l = left_edge;
        l.edge = Edge::left;
        return {BcKind::adtbc, l, mirror_right_edge(l)};
    }

    /// Past layers needed by the convolution sums.
    std::size_t history_depth() const {
        if (kind != BcKind::adtbc) return 0;
        return std::max(left->max_degree(), right->max_degree());
    }
};

/// Boundary values of the last `depth` layers at indices {0,1,2,3} and {N,N-1,N-2,N-3}.
/// Together with the level being solved for this spans n_t = depth + 1 time levels.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    HistoryBuffer(std::size_t depth, std::size_t N) : depth_(depth), N_(N), ring_(depth) {}

    std::size_t depth() const { return depth_; }

    /// Record a new layer as the most recent one.
    void push(std::span<const double> u) {
        if (depth_ == 0) return;
        head_ = (head_ + depth_ - 1) % depth_;
        auto& slot = ring_[head_];
        for (std::size_t i = 0; i < 4; ++i) {
            slot[i] = u[i];
            slot[4 + i] = u[N_ - i];
        }
    }

    /// Value at stencil position i (0..3) of `edge`, j layers back (j = 1 is the latest).
    double at(Edge edge, std::size_t i, std::size_t j) const {
        if (j == 0 || j > depth_) return 0.0;
        const auto& slot = ring_[(head_ + j - 1) % depth_];
        return slot[(edge == Edge::left ? 0 : 4) + i];
    }

    /// Overwrite every stored layer with `u` (warm start from a steady state).
    void fill(std::span<const double> u) {
        for (std::size_t j = 0; j < depth_; ++j) push(u);
    }

    /// Direct access to the layer j back for a given slot (testing hook).
    std::array<double, 8>& layer(std::size_t j) { return ring_[(head_ + j - 1) % depth_]; }

private:
    std::size_t depth_ = 0;
    std::size_t N_ = 0;
    std::size_t head_ = 0;
    std::vector<std::array<double, 8>> ring_;
};

/// Time-invariant system matrix of one step, factored once.
/// Rows 0, 1, N-1, N are boundary rows; rows 2..N-2 carry the interior stencil
/// sigma, beta, alpha, beta, sigma at columns m-2..m+2.
class StepMatrix {
public:
    StepMatrix(const SchemeCoefficients& sc, const BoundaryTreatment& bc, std::size_t N)
        : raw_(N + 1, 3, 3), lu_(N + 1, 3, 3), N_(N) {
        if (N < 7) throw ConfigError("need at least 8 grid points (N >= 7)");
        for (std::size_t m = 2; m + 2 <= N; ++m) {
            set(m, m - 2, sc.sigma);
            set(m, m - 1, sc.beta);
            set(m, m, sc.alpha);
            set(m, m + 1, sc.beta);
            set(m, m + 2, sc.sigma);
        }
        for (Edge e : {Edge::left, Edge::right}) {
            const std::size_t r0 = stencil_index(e, 0, N);
            const std::size_t r1 = stencil_index(e, 1, N);
            auto col = [&](std::size_t i) { return stencil_index(e, i, N); };
            switch (bc.kind) {
                case BcKind::dirichlet_neumann:
                    set(r0, col(0), 1.0);
                    set(r1, col(1), 1.0);
                    break;
                case BcKind::dirichlet_moment:
                    set(r0, col(0), 1.0);
                    set(r1, col(1), 1.0);
                    set(r1, col(2), -0.5);
                    break;
                case BcKind::free_free:
                    set(r0, col(0), 1.0);
                    set(r0, col(2), -3.0);
                    set(r0, col(3), 2.0);
                    set(r1, col(1), 1.0);
                    set(r1, col(2), -2.0);
                    set(r1, col(3), 1.0);
                    break;
                case BcKind::adtbc: {
                    const auto& op = e == Edge::left ? *bc.left : *bc.right;
                    const std::size_t rows[2] = {r0, r1};
                    for (std::size_t k = 0; k < 2; ++k)
                        for (std::size_t i = 0; i < 4; ++i)
                            if (!op.cond[k].poly(i).empty()) set(rows[k], col(i), op.cond[k].poly(i)[0]);
                    break;
                }
            }
        }
        lu_ = raw_;
        if (!lu_.factor()) throw SingularSystem("step matrix is singular for these boundary rows");
    }

    std::size_t N() const { return N_; }
    double entry(std::size_t i, std::size_t j) const { return raw_.get(i, j); }
    void solve(std::span<double> rhs) const { lu_.solve(rhs); }

private:
    void set(std::size_t i, std::size_t j, double v) { raw_.set(i, j, v); }

    BandedLU raw_;
    BandedLU lu_;
    std::size_t N_;
};

/// Crank-Nicolson time integration with a fixed boundary treatment.
class Stepper {
public:
    Stepper(const SchemeCoefficients& sc, BoundaryTreatment bc, std::size_t N)
        : sc_(sc), bc_(std::move(bc)), matrix_(sc_, bc_, N), N_(N),
          history_(bc_.history_depth(), N) {}

    /// Layers n = 0 and n = 1; layers at negative times count as zero.
    void start(std::vector<double> u0, std::vector<double> u1) {
        if (u0.size() != N_ + 1 || u1.size() != N_ + 1) throw Error("Stepper::start: layer size mismatch");
        history_ = HistoryBuffer(bc_.history_depth(), N_);
        history_.push(u0);
        history_.push(u1);
        prev_ = std::move(u0);
        curr_ = std::move(u1);
        level_ = 1;
    }

    /// Advance one step; returns the new layer u^{n+1}.
    const std::vector<double>& step() {
        std::vector<double> next(N_ + 1, 0.0);
        for (std::size_t m = 2; m + 2 <= N_; ++m) {
            next[m] = -(sc_.sigma * (prev_[m + 2] + prev_[m - 2]) +
                        sc_.beta * (prev_[m + 1] + prev_[m - 1]) + sc_.alpha * prev_[m] +
                        sc_.gamma * (curr_[m + 1] + curr_[m - 1]) + sc_.delta * curr_[m]);
        }
        if (bc_.kind == BcKind::adtbc) {
            for (Edge e : {Edge::left, Edge::right}) {
                const auto& op = e == Edge::left ? *bc_.left : *bc_.right;
                for (std::size_t k = 0; k < 2; ++k) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < 4; ++i) {
                        const auto& w = op.cond[k].poly(i);
                        for (std::size_t j = 1; j < w.size(); ++j) acc += w[j] * history_.at(e, i, j);
                    }
                    next[stencil_index(e, k, N_)] = -acc;
                }
            }
        }
        matrix_.solve(next);
        ++level_;
        for (double v : next)
            if (!std::isfinite(v)) throw Divergence("non-finite values in the solution", level_);
        history_.push(next);
        prev_ = std::move(curr_);
        curr_ = std::move(next);
        return curr_;
    }

    std::size_t level() const { return level_; }
    const std::vector<double>& current() const { return curr_; }
    const std::vector<double>& previous() const { return prev_; }
    HistoryBuffer& history() { return history_; }
    const StepMatrix& matrix() const { return matrix_; }
    const BoundaryTreatment& boundary() const { return bc_; }

private:
    SchemeCoefficients sc_;
    BoundaryTreatment bc_;
    StepMatrix matrix_;
    std::size_t N_;
    HistoryBuffer history_;
    std::vector<double> prev_, curr_;
    std::size_t level_ = 0;
};

/// Spatial extent of a run: x_j = x_left + j h, j = 0..N.
struct Domain {
    double x_left = 0.0;
    std::size_t N = 0;
};

inline Domain segment_domain(const ModelParams& m) { return {-0.5 * m.rod.L, m.grid.N}; }

/// Reference domain [-extent*L, extent*L] at the same h.
inline Domain extended_domain(const ModelParams& m, double extent = 40.0) {
    const auto per_l = static_cast<std::size_t>(std::llround(m.rod.L / m.grid.h));
    return {-extent * m.rod.L, static_cast<std::size_t>(std::llround(2.0 * extent)) * per_l};
}

struct RunConfig {
    ModelParams model;
    BoundaryTreatment bc;
    Profile U0 = zero_profile();
    Profile U1 = zero_profile();
    bool keep_frames = false;
    std::optional<std::size_t> steps;  ///< overrides floor(T / tau)
};

/// Time-ordered layers restricted to a window of grid points plus per-layer norms.
struct Trajectory {
    std::vector<double> x;                    ///< window coordinates
    std::vector<std::vector<double>> frames;  ///< one per layer when kept
    NormSeries norms;                         ///< norms over the window
    double h = 0.0, tau = 0.0;
    std::string label;
};

namespace detail {

inline Trajectory integrate(const RunConfig& cfg, const Domain& dom, std::size_t win_begin,
                            std::size_t win_size) {
    const auto& m = cfg.model;
    const std::size_t steps = cfg.steps.value_or(m.grid.steps());
    auto init = build_initial_data(cfg.U0, cfg.U1, m.rod, m.grid.h, m.grid.tau, dom.x_left, dom.N);

    Trajectory traj;
    traj.h = m.grid.h;
    traj.tau = m.grid.tau;
    traj.label = std::string(to_string(cfg.bc.kind));
    for (std::size_t j = 0; j < win_size; ++j)
        traj.x.push_back(dom.x_left + static_cast<double>(win_begin + j) * m.grid.h);

    NormAccumulator acc(m.rod, m.grid.h, m.grid.tau);
    auto record = [&](std::size_t n, const std::vector<double>& u) {
        const std::span<const double> w(u.data() + win_begin, win_size);
        acc.add(static_cast<double>(n) * m.grid.tau, w);
        if (cfg.keep_frames) traj.frames.emplace_back(w.begin(), w.end());
    };

    Stepper stepper(m.coeffs, cfg.bc, dom.N);
    record(0, init.u0);
    if (steps >= 1) record(1, init.u1);
    stepper.start(std::move(init.u0), std::move(init.u1));
    for (std::size_t n = 2; n <= steps; ++n) record(n, stepper.step());
    traj.norms = acc.take();
    return traj;
}

}  // namespace detail

/// Norms of u - u* over the common window; both trajectories must carry frames.
inline NormSeries error_series(const Trajectory& traj, const Trajectory& ref, const RodModel& rod) {
    if (traj.h != ref.h || traj.tau != ref.tau || traj.x.size() != ref.x.size())
        throw Error("error_series: trajectories live on different grids");
    if (traj.frames.empty() || ref.frames.empty())
        throw Error("error_series: both trajectories need frames");
    return error_series(traj.frames, ref.frames, traj.norms.t, rod, traj.h, traj.tau);
}

/// Mixed problem on [-L/2, L/2] under cfg.bc.
inline Trajectory run(const RunConfig& cfg) {
    const auto dom = segment_domain(cfg.model);
    return detail::integrate(cfg, dom, 0, dom.N + 1);
}

/// Whole-line stand-in: the same scheme on [-40L, 40L] with u = 0 and
/// u_1 = u_0 (first difference zero) at both far ends, restricted to [-L/2, L/2].
inline Trajectory reference_run(const RunConfig& cfg, double extent = 40.0) {
    RunConfig ref = cfg;
    ref.bc = BoundaryTreatment::usual(BcKind::dirichlet_neumann);
    const auto dom = extended_domain(cfg.model, extent);
    const std::size_t offset = (dom.N - cfg.model.grid.N) / 2;
    auto traj = detail::integrate(ref, dom, offset, cfg.model.grid.N + 1);
    traj.label = "reference";
    return traj;
}

}  // namespace rodtbc
