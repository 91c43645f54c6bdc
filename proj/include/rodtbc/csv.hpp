#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rodtbc/error.hpp"

namespace rodtbc {

/// One CSV cell; monostate writes an empty field.
using CsvField = std::variant<std::monostate, double, long long, std::size_t, bool, std::string>;

/// Doubles with 17 significant digits (round-trip exact).
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Quotes a field containing separators, quotes or line breaks.
inline std::string csv_quote(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_field(const CsvField& f) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return csv_number(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(std::size_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return csv_quote(v); }
    };
    return std::visit(Visitor{}, f);
}

/// Streams rows to a file with a fixed header; '\n' line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
        : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
        if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << csv_quote(h);
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<CsvField> fields) {
        if (fields.size() != columns_)
            throw Error("CSV row for '" + path_.string() + "' has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(columns_));
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            out_ << csv_field(f);
            first = false;
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw Error("failed writing '" + path_.string() + "'");
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace rodtbc
