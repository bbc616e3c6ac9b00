#pragma once

// Structured pass/fail records, deterministic CSV/JSON emission.  Wall
// times are kept in memory and printed to the console but never serialized:
// the on-disk artifacts must be byte-identical across reruns of the same
// config and build.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace foldhk {

inline constexpr const char* kCodeVersion = "0.1.0";

struct CheckRecord {
    std::string name;
    std::string kind; // "residual", "order", "exponent", "count", "ratio", "status"
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_ms = 0.0; // console-only
};

struct VerificationReport {
    std::string suite;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> checks;

    bool verdict() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    CheckRecord& add(std::string name, std::string kind, double value, double tolerance, bool pass,
                     double wall_ms = 0.0) {
        checks.push_back(CheckRecord{std::move(name), std::move(kind), value, tolerance, pass, wall_ms});
        return checks.back();
    }

    void append(const VerificationReport& other) {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
};

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["suite"] = r.suite;
    j["code_version"] = kCodeVersion;
    j["config_hash"] = r.config_hash;
    j["seed"] = r.seed;
    j["verdict"] = r.verdict() ? "pass" : "fail";
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["kind"] = c.kind;
        jc["value"] = c.value;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        j["checks"].push_back(jc);
    }
    return j;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
    VerificationReport r;
    r.suite = j.at("suite").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jc : j.at("checks")) {
        r.checks.push_back(CheckRecord{jc.at("name").get<std::string>(), jc.at("kind").get<std::string>(),
                                       jc.at("value").get<double>(), jc.at("tolerance").get<double>(),
                                       jc.at("pass").get<bool>(), 0.0});
    }
    return r;
}

inline void write_report(const VerificationReport& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open " + path.string());
    out << report_to_json(r).dump(2) << "\n";
}

inline void print_report(const VerificationReport& r, std::FILE* stream = stdout) {
    for (const auto& c : r.checks) {
        std::fprintf(stream, "[%s] %-52s %s=%.6g tol=%.3g (%.0f ms)\n", c.pass ? "PASS" : "FAIL",
                     c.name.c_str(), c.kind.c_str(), c.value, c.tolerance, c.wall_ms);
    }
    std::fprintf(stream, "suite %s: %s (%zu checks)\n", r.suite.c_str(),
                 r.verdict() ? "PASS" : "FAIL", r.checks.size());
}

// RFC-4180-style CSV with a mandatory header row; numbers are written with
// 17 significant digits so doubles round-trip.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ",";
            out_ << header[i];
        }
        out_ << "\r\n";
        cols_ = header.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != cols_) throw std::invalid_argument("CsvWriter: column mismatch");
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
            out_ << buf;
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
    std::size_t cols_ = 0;
};

// FNV-1a over the canonical config dump (provenance only).
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace foldhk
