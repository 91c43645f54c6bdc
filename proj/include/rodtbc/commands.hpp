#pragma once

#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rodtbc/adtbc.hpp"
#include "rodtbc/config.hpp"
#include "rodtbc/csv.hpp"
#include "rodtbc/diagnostics.hpp"
#include "rodtbc/error.hpp"
#include "rodtbc/initial_data.hpp"
#include "rodtbc/stability.hpp"
#include "rodtbc/stepper.hpp"

namespace rodtbc {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfig = 2,
    kExitSingular = 3,
    kExitDivergence = 4,
};

struct CommandOptions {
    std::optional<std::filesystem::path> out;  ///< overrides output_dir
    bool frames = false;
    std::optional<std::size_t> nt;
    bool full = false;
};

struct CommandResult {
    std::filesystem::path dir;
    std::vector<std::string> files;  ///< relative to dir, in write order
    std::vector<std::string> warnings;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    bool check_failed = false;
};

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string degree_tag(const DegreeSet& d) {
    return std::to_string(d.dP) + "-" + std::to_string(d.dQ) + "-" + std::to_string(d.dR) + "-" +
           std::to_string(d.dS);
}

/// File stem naming the boundary treatment, e.g. adtbc_4-4-8-8_4-4-8-8 or free_free.
inline std::string bc_tag(BcKind kind, const Config& c) {
    std::string tag(to_string(kind));
    if (kind == BcKind::adtbc) {
        tag += "_" + degree_tag(c.d1) + "_" + degree_tag(c.d2);
        if (c.const_constraint) tag += "_const";
    }
    return tag;
}

inline double log10_or_inf(double v) {
    return v > 0.0 ? std::log10(v) : -std::numeric_limits<double>::infinity();
}

inline Profile initial_profile(const Config& c) { return make_profile(c.initial_profile, c.rod.L, c.initial_scale); }

inline RunConfig run_config(const Config& c, const ModelParams& m, BoundaryTreatment bc, const CommandOptions& opt) {
    RunConfig rc;
    rc.model = m;
    rc.bc = std::move(bc);
    rc.U0 = initial_profile(c);
    rc.U1 = zero_profile();
    rc.keep_frames = opt.frames;
    rc.steps = opt.nt;
    return rc;
}

/// Trapezoidal integral of U0 on the segment grid and the warning threshold 1e-8 |U0|_L2.
struct ZerothIntegral {
    double integral = 0.0;
    double threshold = 0.0;
    bool violated() const { return std::abs(integral) > threshold; }
};

inline ZerothIntegral zeroth_integral(const Profile& U0, const ModelParams& m) {
    std::vector<double> u(m.grid.N + 1);
    for (std::size_t j = 0; j <= m.grid.N; ++j) u[j] = U0(-0.5 * m.rod.L + static_cast<double>(j) * m.grid.h);
    ZerothIntegral z;
    for (std::size_t j = 0; j < u.size(); ++j) z.integral += (j == 0 || j + 1 == u.size() ? 0.5 : 1.0) * u[j];
    z.integral *= m.grid.h;
    z.threshold = 1e-8 * grid_norms(u, m.grid.h).L2;
    return z;
}

inline void check_zeroth_integral(const Config& c, const ModelParams& m, CommandResult& res) {
    if (!c.const_constraint) return;
    const auto z = zeroth_integral(initial_profile(c), m);
    res.summary["zeroth_integral"] = z.integral;
    if (z.violated())
        res.warnings.push_back("initial profile has zeroth integral " + csv_number(z.integral) +
                               " (threshold " + csv_number(z.threshold) +
                               "); the constant-solution constraint assumes it vanishes");
}

inline BoundaryOperator derive_for(const Config& c, const ModelParams& m) {
    return derive_adtbc(m.coeffs, c.d1, c.d2, c.const_constraint);
}

inline void write_norms(const std::filesystem::path& path, const NormSeries& s) {
    CsvWriter w(path, {"t", "H_half", "C", "L2"});
    for (std::size_t n = 0; n < s.layers(); ++n) {
        CsvField H = n < s.H.size() ? CsvField(s.H[n]) : CsvField();
        w.row({s.t[n], H, s.C[n], s.L2[n]});
    }
    w.close();
}

/// t, log10 sqrt(H), log10 C, log10 L2 per layer.
inline void write_log_norms(const std::filesystem::path& path, const NormSeries& s) {
    CsvWriter w(path, {"t", "log10_H", "log10_C", "log10_L2"});
    for (std::size_t n = 0; n < s.layers(); ++n) {
        CsvField H = n < s.H.size() ? CsvField(log10_or_inf(std::sqrt(s.H[n]))) : CsvField();
        w.row({s.t[n], H, log10_or_inf(s.C[n]), log10_or_inf(s.L2[n])});
    }
    w.close();
}

inline void write_frames(const std::filesystem::path& path, const Trajectory& tr) {
    CsvWriter w(path, {"t", "x", "u"});
    for (std::size_t n = 0; n < tr.frames.size(); ++n)
        for (std::size_t j = 0; j < tr.x.size(); ++j) w.row({tr.norms.t[n], tr.x[j], tr.frames[n][j]});
    w.close();
}

inline nlohmann::ordered_json operator_json(const BoundaryOperator& op) {
    nlohmann::ordered_json j;
    for (std::size_t k = 0; k < 2; ++k) {
        nlohmann::ordered_json cond;
        cond["degrees"] = op.degrees[k].to_string();
        cond["smallness_order"] = op.smallness[k];
        cond["condition_number"] = op.report.condition_number[k];
        cond["residual_norm"] = op.report.residual_norm[k];
        cond["achieved_order"] = op.report.achieved_order[k];
        cond["coefficient_sum"] = op.cond[k].total();
        j["k" + std::to_string(k + 1)] = cond;
    }
    j["imag_residue"] = op.report.imag_residue;
    return j;
}

inline void cmd_derive_bc(const Config& c, const CommandOptions&, CommandResult& res) {
    const auto m = c.model();
    check_zeroth_integral(c, m, res);
    Stopwatch sw;
    const auto op = derive_for(c, m);
    res.timings["derive_s"] = sw.seconds();

    const std::string stem = "coefficients_" + bc_tag(BcKind::adtbc, c);
    {
        std::ofstream f(res.dir / (stem + ".csv"), std::ios::binary);
        write_coefficient_table(f, op, -1);
        if (!f) throw Error("failed writing coefficient table");
    }
    res.files.push_back(stem + ".csv");
    {
        std::ofstream f(res.dir / (stem + "_6dp.csv"), std::ios::binary);
        write_coefficient_table(f, op, 6);
        if (!f) throw Error("failed writing coefficient table");
    }
    res.files.push_back(stem + "_6dp.csv");

    CsvWriter w(res.dir / "derivation_report.csv",
                {"k", "degrees", "unknowns", "smallness_order", "condition_number", "residual_norm",
                 "achieved_order", "coefficient_sum", "imag_residue"});
    for (std::size_t k = 0; k < 2; ++k)
        w.row({k + 1, op.degrees[k].to_string(), op.degrees[k].unknowns(), op.smallness[k],
               op.report.condition_number[k], op.report.residual_norm[k], op.report.achieved_order[k],
               op.cond[k].total(), op.report.imag_residue});
    w.close();
    res.files.push_back("derivation_report.csv");

    const auto reg = m.regime;
    res.summary["nu"] = m.coeffs.nu;
    res.summary["mu"] = m.coeffs.mu;
    res.summary["epsilon"] = reg.epsilon;
    res.summary["theta_real"] = reg.theta_real;
    res.summary["derivation"] = operator_json(op);
}

inline void cmd_simulate(const Config& c, const CommandOptions& opt, CommandResult& res) {
    const auto m = c.model();
    BoundaryTreatment bc = BoundaryTreatment::usual(BcKind::dirichlet_neumann);
    if (c.bc == BcKind::adtbc) {
        check_zeroth_integral(c, m, res);
        Stopwatch sw;
        const auto op = derive_for(c, m);
        res.timings["derive_s"] = sw.seconds();
        res.summary["derivation"] = operator_json(op);
        bc = BoundaryTreatment::transparent(op);
    } else {
        bc = BoundaryTreatment::usual(c.bc);
    }
    Stopwatch sw;
    const auto tr = run(run_config(c, m, bc, opt));
    res.timings["run_s"] = sw.seconds();

    const auto tag = bc_tag(c.bc, c);
    write_norms(res.dir / ("norms_" + tag + ".csv"), tr.norms);
    res.files.push_back("norms_" + tag + ".csv");
    if (opt.frames) {
        write_frames(res.dir / ("frames_" + tag + ".csv"), tr);
        res.files.push_back("frames_" + tag + ".csv");
    }

    bool energy_ok = true;
    if (!tr.norms.H.empty()) {
        const double bound = std::sqrt(tr.norms.H[0]) * (1.0 + kCriterionSlack);
        for (double H : tr.norms.H)
            if (std::sqrt(H) > bound) energy_ok = false;
    }
    res.summary["bc"] = std::string(to_string(c.bc));
    res.summary["layers"] = tr.norms.layers();
    res.summary["final_C"] = tr.norms.C.back();
    res.summary["energy_non_increasing"] = energy_ok;
}

inline void cmd_compare(const Config& c, const CommandOptions& opt, CommandResult& res) {
    const auto m = c.model();
    check_zeroth_integral(c, m, res);
    CommandOptions with_frames = opt;
    with_frames.frames = true;

    Stopwatch sw_ref;
    auto ref_future = std::async(std::launch::async, [&] {
        auto rc = run_config(c, m, BoundaryTreatment::usual(BcKind::dirichlet_neumann), with_frames);
        return reference_run(rc, c.reference_extent);
    });

    Stopwatch sw;
    const auto op = derive_for(c, m);
    res.timings["derive_s"] = sw.seconds();
    res.summary["derivation"] = operator_json(op);

    struct Candidate {
        BcKind kind;
        Trajectory traj;
    };
    std::vector<Candidate> cands;
    Stopwatch sw_runs;
    for (BcKind k : {BcKind::adtbc, BcKind::dirichlet_neumann, BcKind::dirichlet_moment, BcKind::free_free}) {
        auto bc = k == BcKind::adtbc ? BoundaryTreatment::transparent(op) : BoundaryTreatment::usual(k);
        cands.push_back({k, run(run_config(c, m, bc, with_frames))});
    }
    res.timings["candidates_s"] = sw_runs.seconds();
    const auto ref = ref_future.get();
    res.timings["reference_s"] = sw_ref.seconds();

    write_log_norms(res.dir / "reference_norms.csv", ref.norms);
    res.files.push_back("reference_norms.csv");

    CsvWriter summary(res.dir / "summary.csv", {"bc", "final_C_error", "max_C_error", "final_C_ratio_to_adtbc"});
    double adtbc_final = 0.0;
    nlohmann::ordered_json errs = nlohmann::ordered_json::object();
    for (const auto& cand : cands) {
        const auto err = error_series(cand.traj, ref, m.rod);
        const auto tag = bc_tag(cand.kind, c);
        write_log_norms(res.dir / ("error_" + tag + ".csv"), err);
        res.files.push_back("error_" + tag + ".csv");
        if (cand.kind == BcKind::adtbc) {
            adtbc_final = err.C.back();
            CsvWriter heat(res.dir / ("heatmap_" + tag + ".csv"), {"t", "x", "log10_abs_diff"});
            for (std::size_t n = 0; n < cand.traj.frames.size(); ++n)
                for (std::size_t j = 0; j < cand.traj.x.size(); ++j)
                    heat.row({cand.traj.norms.t[n], cand.traj.x[j],
                              log10_or_inf(std::abs(cand.traj.frames[n][j] - ref.frames[n][j]))});
            heat.close();
            res.files.push_back("heatmap_" + tag + ".csv");
        }
        double max_c = 0.0;
        for (double v : err.C) max_c = std::max(max_c, v);
        const double ratio = adtbc_final > 0.0 ? err.C.back() / adtbc_final : std::numeric_limits<double>::infinity();
        summary.row({std::string(to_string(cand.kind)), err.C.back(), max_c, ratio});
        errs[std::string(to_string(cand.kind))] = {{"final_C_error", err.C.back()}, {"max_C_error", max_c}};
    }
    summary.close();
    res.files.push_back("summary.csv");
    res.summary["errors"] = errs;

    CsvWriter fits(res.dir / "decay_fit.csv", {"norm", "c", "exponent", "t_lo", "t_hi", "samples"});
    std::vector<double> sqrtH(ref.norms.H.size());
    for (std::size_t i = 0; i < sqrtH.size(); ++i) sqrtH[i] = std::sqrt(ref.norms.H[i]);
    const std::span<const double> tH(ref.norms.t.data(), sqrtH.size());
    auto add_fit = [&](const char* name, std::span<const double> t, std::span<const double> v) {
        try {
            const auto f = decay_fit(t, v, c.fit_t_min, c.fit_t_max);
            fits.row({std::string(name), f.c, f.exponent, c.fit_t_min, c.fit_t_max, f.samples});
            res.summary["decay_" + std::string(name)] = {{"c", f.c}, {"exponent", f.exponent}};
        } catch (const Error& e) {
            res.warnings.push_back(std::string("decay fit of ") + name + ": " + e.what());
        }
    };
    add_fit("energy", tH, sqrtH);
    add_fit("C", ref.norms.t, ref.norms.C);
    add_fit("L2", ref.norms.t, ref.norms.L2);
    fits.close();
    res.files.push_back("decay_fit.csv");
}

inline ScanConfig scan_config(const Config& c, std::size_t steps) {
    ScanConfig sc;
    sc.rod = c.rod;
    sc.h = integer_grid_steps(c.rod.L, c.scan_h_min, c.scan_h_max, c.scan_h_count);
    const auto taus = geometric_range(c.scan_tau_min, c.scan_tau_max, c.scan_tau_count);
    sc.tau.assign(sc.h.size(), taus);
    sc.d1 = c.d1;
    sc.d2 = c.d2;
    sc.const_constraint = c.const_constraint;
    sc.steps = steps;
    sc.profile = c.initial_profile;
    sc.threads = c.threads;
    return sc;
}

inline void write_stability_map(const std::filesystem::path& path, const StabilityMap& map) {
    CsvWriter w(path, {"h", "tau", "bc_exists", "stable_energy", "stable_C", "stable_L2", "first_violation_step"});
    for (const auto& v : map.cells) {
        if (!v.bc_exists) {
            w.row({v.h, v.tau, false, {}, {}, {}, {}});
            continue;
        }
        const auto first = v.first_violation_step();
        w.row({v.h, v.tau, true, v.stable_energy(), v.stable_C(), v.stable_L2(),
               first ? CsvField(first) : CsvField()});
    }
    w.close();
}

inline void cmd_scan(const Config& c, const CommandOptions& opt, CommandResult& res) {
    const std::size_t steps = opt.full ? kFullScanSteps : opt.nt.value_or(c.scan_steps);
    const auto sc = scan_config(c, steps);
    Stopwatch sw;
    const auto map = scan_stability(sc);
    res.timings["scan_s"] = sw.seconds();

    write_stability_map(res.dir / "stability_map.csv", map);
    res.files.push_back("stability_map.csv");

    res.summary["mode"] = opt.full ? "full" : "desk";
    res.summary["steps"] = steps;
    res.summary["initial_profile"] = std::string(to_string(c.initial_profile)) + " sampled on each cell grid, U1 = 0";
    res.summary["cells"] = map.cells.size();
    res.summary["stable_bands"] = stable_band_count(map);

    CsvWriter fitw(res.dir / "parabola_fit.csv", {"boundary", "A", "r_squared"});
    CsvWriter ptsw(res.dir / "boundary_points.csv", {"boundary", "h", "tau"});
    try {
        const auto fit = fit_parabolas(map);
        fitw.row({std::string("lower"), fit.lower.A, fit.lower.r_squared});
        fitw.row({std::string("upper"), fit.upper.A, fit.upper.r_squared});
        for (const auto& p : fit.lower_points) ptsw.row({std::string("lower"), p.h, p.tau});
        for (const auto& p : fit.upper_points) ptsw.row({std::string("upper"), p.h, p.tau});
        res.summary["A1"] = fit.lower.A;
        res.summary["A2"] = fit.upper.A;
        res.summary["A1_sqrtC"] = fit.lower.A * std::sqrt(c.rod.bending());
        res.summary["A2_sqrtC"] = fit.upper.A * std::sqrt(c.rod.bending());
    } catch (const Error& e) {
        res.warnings.push_back(std::string("parabola fit: ") + e.what());
    }
    fitw.close();
    ptsw.close();
    res.files.push_back("parabola_fit.csv");
    res.files.push_back("boundary_points.csv");
}

inline void cmd_check_cauchy(const Config& c, const CommandOptions&, CommandResult& res) {
    const auto grid = make_grid(c.rod, c.h, c.tau, c.T);
    const auto d = dimensionless_params(c.rod, grid);
    const auto rep = check_cauchy(c.h, d.nu, d.mu);

    CsvWriter sym(res.dir / "cauchy_symbol.csv", {"xi", "modulus1", "modulus2", "discriminant"});
    const double xi_max = std::numbers::pi / c.h;
    for (std::size_t i = 0; i < rep.samples; ++i) {
        const double xi = xi_max * static_cast<double>(i) / static_cast<double>(rep.samples - 1);
        const auto a = cauchy_amplification(xi, c.h, d.nu, d.mu);
        sym.row({xi, a.modulus1, a.modulus2, a.discriminant});
    }
    sym.close();
    res.files.push_back("cauchy_symbol.csv");

    CsvWriter w(res.dir / "cauchy_report.csv", {"quantity", "value"});
    w.row({std::string("nu"), d.nu});
    w.row({std::string("mu"), d.mu});
    w.row({std::string("samples"), rep.samples});
    w.row({std::string("max_modulus"), rep.max_modulus});
    w.row({std::string("xi_at_max"), rep.xi_at_max});
    w.row({std::string("modulus_at_zero"), rep.modulus_at_zero});
    w.row({std::string("max_discriminant"), rep.max_discriminant});
    w.row({std::string("pass"), rep.pass});
    w.close();
    res.files.push_back("cauchy_report.csv");

    res.summary["nu"] = d.nu;
    res.summary["mu"] = d.mu;
    res.summary["max_modulus"] = rep.max_modulus;
    res.summary["modulus_at_zero"] = rep.modulus_at_zero;
    res.summary["pass"] = rep.pass;
    res.check_failed = !rep.pass;
}

inline std::string flags_tag(const CommandOptions& opt) {
    std::string s = "frames=" + std::string(opt.frames ? "1" : "0") + ";full=" + (opt.full ? "1" : "0");
    if (opt.nt) s += ";nt=" + std::to_string(*opt.nt);
    return s;
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"derive-bc", "simulate", "compare", "scan", "check-cauchy"};
    return names;
}

/// Output directory <out>/<command>-<hash of canonical config and flags>.
inline std::filesystem::path run_directory(const std::string& command, const Config& c, const CommandOptions& opt) {
    const auto base = opt.out ? *opt.out : std::filesystem::path(c.output_dir);
    const auto key = command + "\n" + serialize_config(c) + detail::flags_tag(opt);
    return base / (command + "-" + hex16(fnv1a64(key)));
}

/// Runs one command, writing its CSV files and finally manifest.json.
inline CommandResult run_command(const std::string& command, const Config& c, const CommandOptions& opt) {
    CommandResult res;
    res.dir = run_directory(command, c, opt);
    std::filesystem::create_directories(res.dir);
    std::filesystem::remove(res.dir / "manifest.json");

    detail::Stopwatch total;
    if (command == "derive-bc")
        detail::cmd_derive_bc(c, opt, res);
    else if (command == "simulate")
        detail::cmd_simulate(c, opt, res);
    else if (command == "compare")
        detail::cmd_compare(c, opt, res);
    else if (command == "scan")
        detail::cmd_scan(c, opt, res);
    else if (command == "check-cauchy")
        detail::cmd_check_cauchy(c, opt, res);
    else
        throw ConfigError("unknown command '" + command + "'");
    res.timings["total_s"] = total.seconds();

    nlohmann::ordered_json m;
    m["command"] = command;
    m["config"] = serialize_config(c);
    m["flags"] = {{"frames", opt.frames}, {"full", opt.full}, {"nt", opt.nt ? nlohmann::ordered_json(*opt.nt) : nullptr}};
    m["outputs"] = res.files;
    m["warnings"] = res.warnings;
    m["summary"] = res.summary;
    m["versions"] = {{"rodtbc", kVersion}, {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}};
    m["timings"] = res.timings;
    m["finished_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    std::ofstream f(res.dir / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    if (!f) throw Error("failed writing manifest.json");
    return res;
}

}  // namespace rodtbc
