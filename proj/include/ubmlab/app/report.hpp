#pragma once

// Machine-readable outputs. report.json holds everything that is a function of
// (config, seed) and is byte-identical across runs and thread counts; execution
// data (timestamp, runtimes, thread count) goes to the separate timing.json.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ubmlab/app/config.hpp"
#include "ubmlab/verify.hpp"

#ifndef UBMLAB_VERSION
#define UBMLAB_VERSION "1.0.0"
#endif

namespace ubmlab::app {

inline constexpr const char* kCodeVersion = UBMLAB_VERSION;

/// One configured check after the retry policy.
struct CheckRecord {
    CheckSpec spec;
    Verdict verdict;
    /// Failed first attempt when the check was rerun with 4x the paths.
    std::optional<Verdict> first_attempt;
};

struct RunReport {
    SuiteConfig config;
    std::vector<CheckRecord> records;
    bool pass = true;
    std::string timestamp;
};

/// 17 significant digits in scientific notation.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json verdict_json(const Verdict& v) {
    Json j{{"name", v.name},
           {"lhs", complex_json(v.lhs)},
           {"rhs", complex_json(v.rhs)},
           {"lhs_se", v.lhs_se},
           {"rhs_se", v.rhs_se},
           {"residual", v.residual},
           {"combined_se", v.combined_se},
           {"bias_allowance", v.bias_allowance},
           {"tolerance", v.tolerance},
           {"pass", v.pass},
           {"samples", v.samples}};
    if (!v.parts.empty()) {
        Json parts = Json::array();
        for (const auto& p : v.parts) parts.push_back(verdict_json(p));
        j["parts"] = parts;
    }
    return j;
}

inline Json report_json(const RunReport& r) {
    Json records = Json::array();
    for (const auto& rec : r.records) {
        Json j{{"check", to_json(rec.spec)}, {"verdict", verdict_json(rec.verdict)}, {"retried", rec.first_attempt.has_value()}};
        if (rec.first_attempt) j["first_attempt"] = verdict_json(*rec.first_attempt);
        records.push_back(j);
    }
    Json config = to_json(r.config);
    config.erase("threads");
    return Json{{"code_version", kCodeVersion}, {"config", config}, {"pass", r.pass}, {"verdicts", records}};
}

inline Json timing_json(const RunReport& r) {
    Json runs = Json::array();
    for (const auto& rec : r.records) {
        Json j{{"name", rec.verdict.name}, {"runtime_s", rec.verdict.runtime_s}};
        if (rec.first_attempt) j["first_attempt_runtime_s"] = rec.first_attempt->runtime_s;
        runs.push_back(j);
    }
    return Json{{"code_version", kCodeVersion}, {"timestamp", r.timestamp}, {"threads", r.config.threads}, {"runtimes", runs}};
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// One line per verdict, then the suite result.
inline std::string summary_text(const RunReport& r) {
    std::ostringstream out;
    for (const auto& rec : r.records) {
        const auto& v = rec.verdict;
        char line[512];
        std::snprintf(line, sizeof(line), "%s  %-48s residual=%.3e tolerance=%.3e%s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(),
                      v.residual, v.tolerance, rec.first_attempt ? "  (retried with 4x paths)" : "");
        out << line;
    }
    out << (r.pass ? "suite: PASS" : "suite: FAIL") << "\n";
    return out.str();
}

/// Writes `text` with LF line endings, creating parent directories.
inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Moment tables
// ---------------------------------------------------------------------------

struct MomentRow {
    std::string quantity;
    std::size_t n = 0;
    std::size_t dim = 0;
    double t = 0.0;
    double mean_re = 0.0;
    double mean_im = 0.0;
    double se = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
};

inline constexpr const char* kMomentHeader = "quantity,n,N,t,mean_re,mean_im,se,M,seed";

inline std::string moment_csv(const std::vector<MomentRow>& rows) {
    std::ostringstream out;
    out << kMomentHeader << "\n";
    for (const auto& r : rows) {
        out << r.quantity << "," << r.n << "," << r.dim << "," << format_double(r.t) << "," << format_double(r.mean_re) << ","
            << format_double(r.mean_im) << "," << format_double(r.se) << "," << r.paths << "," << r.seed << "\n";
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <class T>
T parse_field(const std::string& text, const std::string& where, const char* column) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !in.eof()) throw ParseError(where + ": column '" + column + "' has invalid value '" + text + "'");
    return value;
}

}  // namespace detail

/// Parses a moment CSV; errors name the file and line.
inline std::vector<MomentRow> read_moment_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    std::size_t line_no = 0;
    std::vector<MomentRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string where = path + ":" + std::to_string(line_no);
        if (line_no == 1) {
            if (line != kMomentHeader) throw ParseError(where + ": expected header '" + std::string(kMomentHeader) + "'");
            continue;
        }
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 9) throw ParseError(where + ": expected 9 fields, found " + std::to_string(f.size()));
        MomentRow r;
        r.quantity = f[0];
        if (r.quantity != "F" && r.quantity != "nu" && r.quantity != "mu") throw ParseError(where + ": unknown quantity '" + r.quantity + "'");
        r.n = detail::parse_field<std::size_t>(f[1], where, "n");
        r.dim = detail::parse_field<std::size_t>(f[2], where, "N");
        r.t = detail::parse_field<double>(f[3], where, "t");
        r.mean_re = detail::parse_field<double>(f[4], where, "mean_re");
        r.mean_im = detail::parse_field<double>(f[5], where, "mean_im");
        r.se = detail::parse_field<double>(f[6], where, "se");
        r.paths = detail::parse_field<std::size_t>(f[7], where, "M");
        r.seed = detail::parse_field<std::uint64_t>(f[8], where, "seed");
        rows.push_back(r);
    }
    if (line_no == 0) throw ParseError(path + ":1: empty file, expected a header");
    return rows;
}

}  // namespace ubmlab::app
