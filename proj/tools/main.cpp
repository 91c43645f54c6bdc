#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rodtbc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Transparent boundary conditions for the Crank-Nicolson rod vibration scheme"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool frames = false;
    bool full = false;
    std::size_t nt = 0;

    for (const auto& name : rodtbc::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Config file (key = value)")->required();
        sub->add_option("--out", out_dir, "Output base directory (overrides output_dir)");
        sub->add_flag("--frames", frames, "Write per-layer frame CSVs");
        sub->add_option("--nt", nt, "Override the number of time steps")->check(CLI::PositiveNumber);
        sub->add_flag("--full", full, "Scan with 1e5 steps per cell");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? rodtbc::kExitOk : rodtbc::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    rodtbc::CommandOptions opt;
    if (!out_dir.empty()) opt.out = out_dir;
    opt.frames = frames;
    opt.full = full;
    if (nt > 0) opt.nt = nt;

    try {
        const auto cfg = rodtbc::load_config(config_path);
        const auto res = rodtbc::run_command(command, cfg, opt);
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << res.dir.string() << '\n';
        for (const auto& [key, value] : res.summary.items())
            if (!value.is_object()) std::cout << "  " << key << " = " << value.dump() << '\n';
        return res.check_failed ? rodtbc::kExitCheckFailed : rodtbc::kExitOk;
    } catch (const rodtbc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return rodtbc::kExitConfig;
    } catch (const rodtbc::RegimeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return rodtbc::kExitConfig;
    } catch (const rodtbc::SingularSystem& e) {
        std::cerr << "derivation singular: " << e.what() << '\n';
        return rodtbc::kExitSingular;
    } catch (const rodtbc::Divergence& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return rodtbc::kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rodtbc::kExitCheckFailed;
    }
}
