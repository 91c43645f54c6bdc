#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "rodtbc/adtbc.hpp"
#include "rodtbc/error.hpp"
#include "rodtbc/initial_data.hpp"
#include "rodtbc/params.hpp"
#include "rodtbc/stepper.hpp"

namespace rodtbc {

/// Run configuration read from a `key = value` text file. Lines starting with
/// '#' and blank lines are ignored; every key may appear at most once.
struct Config {
    RodModel rod;
    double h = 0.0;
    double tau = 0.0;
    double T = 0.0;
    BcKind bc = BcKind::adtbc;
    DegreeSet d1{4, 4, 8, 8};
    DegreeSet d2{4, 4, 8, 8};
    bool const_constraint = false;
    std::string output_dir = "out";

    InitialProfile initial_profile = InitialProfile::odd_gaussian;
    double initial_scale = 1.0;
    double reference_extent = 40.0;
    double fit_t_min = 0.1;
    double fit_t_max = 0.25;

    double scan_h_min = 0.0125;
    double scan_h_max = 0.03;
    std::size_t scan_h_count = 20;
    double scan_tau_min = 2e-5;
    double scan_tau_max = 5e-4;
    std::size_t scan_tau_count = 20;
    std::size_t scan_steps = 10000;
    unsigned threads = 0;

    ModelParams model() const { return make_model(rod, h, tau, T); }

    friend bool operator==(const Config&, const Config&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
    return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean (true | false)");
}

inline std::pair<DegreeSet, DegreeSet> parse_degrees(const std::string& v) {
    std::vector<std::size_t> d;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) d.push_back(parse_count("degrees", token));
        token.clear();
    };
    for (char c : v) {
        if (c == ',' || c == ';' || c == ' ' || c == '\t')
            flush();
        else
            token += c;
    }
    flush();
    if (d.size() != 4 && d.size() != 8)
        throw ConfigError("key 'degrees': expected 4 integers (both conditions) or 8 (k = 1 then k = 2), got " +
                          std::to_string(d.size()));
    DegreeSet a{d[0], d[1], d[2], d[3]};
    DegreeSet b = d.size() == 8 ? DegreeSet{d[4], d[5], d[6], d[7]} : a;
    return {a, b};
}

inline std::string_view profile_name(InitialProfile p) {
    switch (p) {
        case InitialProfile::odd_gaussian: return "odd_gaussian";
        case InitialProfile::shifted_gaussian: return "shifted_gaussian";
        case InitialProfile::zero: return "zero";
    }
    return "?";
}

inline InitialProfile parse_profile(const std::string& v) {
    for (auto p : {InitialProfile::odd_gaussian, InitialProfile::shifted_gaussian, InitialProfile::zero})
        if (v == profile_name(p)) return p;
    throw ConfigError("key 'initial_profile': '" + v + "' (expected odd_gaussian | shifted_gaussian | zero)");
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline std::string_view to_string(InitialProfile p) { return detail::profile_name(p); }

inline Config parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        auto key = detail::trim(std::string_view(body).substr(0, eq));
        auto value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    Config c;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        auto v = it->second;
        kv.erase(it);
        return v;
    };
    auto required = [&](const char* key) {
        auto v = take(key);
        if (!v) throw ConfigError(std::string("missing required key '") + key + "'");
        return detail::parse_double(key, *v);
    };
    c.rod.rho = required("rho");
    c.rod.E = required("E");
    c.rod.R = required("R");
    c.rod.L = required("L");
    c.h = required("h");
    c.tau = required("tau");
    c.T = required("T");
    if (auto v = take("bc")) c.bc = parse_bc_kind(*v);
    if (auto v = take("degrees")) std::tie(c.d1, c.d2) = detail::parse_degrees(*v);
    if (auto v = take("const_constraint")) c.const_constraint = detail::parse_bool("const_constraint", *v);
    if (auto v = take("output_dir")) c.output_dir = *v;
    if (auto v = take("initial_profile")) c.initial_profile = detail::parse_profile(*v);
    if (auto v = take("initial_scale")) c.initial_scale = detail::parse_double("initial_scale", *v);
    if (auto v = take("reference_extent")) c.reference_extent = detail::parse_double("reference_extent", *v);
    if (auto v = take("fit_t_min")) c.fit_t_min = detail::parse_double("fit_t_min", *v);
    if (auto v = take("fit_t_max")) c.fit_t_max = detail::parse_double("fit_t_max", *v);
    if (auto v = take("scan_h_min")) c.scan_h_min = detail::parse_double("scan_h_min", *v);
    if (auto v = take("scan_h_max")) c.scan_h_max = detail::parse_double("scan_h_max", *v);
    if (auto v = take("scan_h_count")) c.scan_h_count = detail::parse_count("scan_h_count", *v);
    if (auto v = take("scan_tau_min")) c.scan_tau_min = detail::parse_double("scan_tau_min", *v);
    if (auto v = take("scan_tau_max")) c.scan_tau_max = detail::parse_double("scan_tau_max", *v);
    if (auto v = take("scan_tau_count")) c.scan_tau_count = detail::parse_count("scan_tau_count", *v);
    if (auto v = take("scan_steps")) c.scan_steps = detail::parse_count("scan_steps", *v);
    if (auto v = take("threads")) c.threads = static_cast<unsigned>(detail::parse_count("threads", *v));
    if (!kv.empty()) throw ConfigError("unknown config key '" + kv.begin()->first + "'");

    c.rod.validate();
    if (c.output_dir.empty()) throw ConfigError("key 'output_dir' must not be empty");
    if (!(c.reference_extent >= 1.0)) throw ConfigError("reference_extent must be at least 1");
    if (!(c.fit_t_max > c.fit_t_min)) throw ConfigError("fit_t_max must exceed fit_t_min");
    return c;
}

inline Config parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Canonical form: every key in a fixed order, shortest round-trip doubles.
inline std::string serialize_config(const Config& c) {
    using detail::format_double;
    std::ostringstream os;
    auto degrees = [](const DegreeSet& d) {
        return std::to_string(d.dP) + "," + std::to_string(d.dQ) + "," + std::to_string(d.dR) + "," +
               std::to_string(d.dS);
    };
    os << "rho = " << format_double(c.rod.rho) << '\n'
       << "E = " << format_double(c.rod.E) << '\n'
       << "R = " << format_double(c.rod.R) << '\n'
       << "L = " << format_double(c.rod.L) << '\n'
       << "h = " << format_double(c.h) << '\n'
       << "tau = " << format_double(c.tau) << '\n'
       << "T = " << format_double(c.T) << '\n'
       << "bc = " << to_string(c.bc) << '\n'
       << "degrees = " << degrees(c.d1) << "; " << degrees(c.d2) << '\n'
       << "const_constraint = " << (c.const_constraint ? "true" : "false") << '\n'
       << "output_dir = " << c.output_dir << '\n'
       << "initial_profile = " << to_string(c.initial_profile) << '\n'
       << "initial_scale = " << format_double(c.initial_scale) << '\n'
       << "reference_extent = " << format_double(c.reference_extent) << '\n'
       << "fit_t_min = " << format_double(c.fit_t_min) << '\n'
       << "fit_t_max = " << format_double(c.fit_t_max) << '\n'
       << "scan_h_min = " << format_double(c.scan_h_min) << '\n'
       << "scan_h_max = " << format_double(c.scan_h_max) << '\n'
       << "scan_h_count = " << c.scan_h_count << '\n'
       << "scan_tau_min = " << format_double(c.scan_tau_min) << '\n'
       << "scan_tau_max = " << format_double(c.scan_tau_max) << '\n'
       << "scan_tau_count = " << c.scan_tau_count << '\n'
       << "scan_steps = " << c.scan_steps << '\n'
       << "threads = " << c.threads << '\n';
    return os.str();
}

/// 64-bit FNV-1a, used to name per-run output directories.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace rodtbc
