#pragma once

// Artifact writers: shortest round-trip CSV, JSON reports and SHA-256 digests.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "ftl/diagnostics.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/measures.hpp"
#include "ftl/piecewise.hpp"

namespace ftl::harness {

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        for (std::size_t c = 0; c < header.size(); ++c) out_ << (c ? "," : "") << header[c];
        out_ << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        static_assert(sizeof...(Cells) > 0);
        if (sizeof...(Cells) != columns_) throw std::logic_error("csv: column count mismatch");
        std::size_t c = 0;
        ((out_ << (c++ ? "," : "") << cell(cells)), ...);
        out_ << '\n';
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    static std::string cell(double x) { return format_number(x); }
    static std::string cell(std::size_t n) { return std::to_string(n); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }

    std::size_t columns_;
    std::ostringstream out_;
};

/// t,i,x_i for every particle at every sample.
inline std::string trajectory_csv(const Trajectory& traj) {
    CsvWriter w({"t", "i", "x_i"});
    for (const auto& s : traj.states) {
        const auto x = s.positions();
        for (std::size_t i = 0; i < x.size(); ++i) w.row(s.time(), i, x[i]);
    }
    return w.str();
}

/// t,x_left,x_right,value per piece of each density.
inline std::string density_csv(std::span<const double> times, std::span<const PiecewiseConstantDensity> densities) {
    CsvWriter w({"t", "x_left", "x_right", "value"});
    for (std::size_t k = 0; k < densities.size(); ++k) {
        const auto b = densities[k].breakpoints();
        const auto v = densities[k].values();
        for (std::size_t j = 0; j < v.size(); ++j) w.row(times[k], b[j], b[j + 1], v[j]);
    }
    return w.str();
}

/// z,X(z) at the knots of a pseudo-inverse (left and right values at jumps).
inline std::string quantile_csv(const PiecewiseMonotone& X) {
    CsvWriter w({"z", "X"});
    const auto k = X.knots();
    for (std::size_t j = 0; j < X.pieces(); ++j) {
        w.row(k[j], X.lo()[j]);
        w.row(k[j + 1], X.hi()[j]);
    }
    w.row(k.back(), X.after());
    return w.str();
}

namespace detail {

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? finite_or_null(*v) : json(nullptr);
}

}  // namespace detail

inline json to_json(const DiagnosticsReport& rep) {
    json j;
    j["passed"] = rep.passed();
    j["R"] = rep.R;
    j["tv_initial_datum"] = rep.tv_initial_datum;
    j["assumptions"] = {{"strictly_decreasing", rep.assumptions.strictly_decreasing},
                        {"vmax_consistent", rep.assumptions.vmax_consistent},
                        {"rho_dv_nonincreasing", rep.assumptions.rho_dv_nonincreasing}};
    j["warnings"] = rep.warnings;
    j["violations"] = json::array();
    for (const auto& v : rep.violations)
        j["violations"].push_back({{"time", v.time}, {"check", v.check}, {"value", detail::finite_or_null(v.value)},
                                   {"bound", detail::finite_or_null(v.bound)}});
    j["samples"] = json::array();
    for (const auto& s : rep.samples)
        j["samples"].push_back({{"time", s.time},
                                {"min_gap_ratio", s.min_gap_ratio},
                                {"oleinik_max", s.oleinik_max},
                                {"oleinik_leader", s.oleinik_leader},
                                {"slope_excess", detail::optional_json(s.slope_excess)},
                                {"tv_hat", s.tv_hat},
                                {"tv_v_hat", s.tv_v_hat},
                                {"C_delta", detail::optional_json(s.C_delta)},
                                {"entropy_min_K", detail::finite_or_null(s.entropy_min_K)},
                                {"leader_deviation", s.leader_deviation}});
    if (rep.moduli) {
        const auto& m = *rep.moduli;
        j["time_continuity"] = {{"R", m.R},
                                {"C_delta", m.C_delta},
                                {"l1_constant", m.l1_constant},
                                {"wasserstein_constant", m.wasserstein_constant},
                                {"l1_worst_slack", detail::finite_or_null(m.l1_worst_slack)},
                                {"wasserstein_worst_slack", detail::finite_or_null(m.wasserstein_worst_slack)},
                                {"l1_pairs", m.l1_pairs},
                                {"wasserstein_pairs", m.wasserstein_pairs}};
    } else {
        j["time_continuity"] = nullptr;
    }
    return j;
}

inline std::string diagnostics_csv(const DiagnosticsReport& rep) {
    CsvWriter w({"t", "min_gap_ratio", "oleinik_max", "oleinik_leader", "tv_hat", "tv_v_hat", "entropy_min_K",
                 "leader_deviation"});
    for (const auto& s : rep.samples)
        w.row(s.time, s.min_gap_ratio, s.oleinik_max, s.oleinik_leader, s.tv_hat, s.tv_v_hat, s.entropy_min_K,
              s.leader_deviation);
    return w.str();
}

inline json to_json(const IntegratorMetadata& m) {
    return {{"method", to_string(m.method)},
            {"dt_nominal", m.dt_nominal},
            {"dt_min_used", m.dt_min_used},
            {"dt_max_used", m.dt_max_used},
            {"abs_tol", m.abs_tol},
            {"rel_tol", m.rel_tol},
            {"gap_floor", m.gap_floor},
            {"accepted_steps", m.accepted_steps},
            {"gap_rejections", m.gap_rejections},
            {"error_rejections", m.error_rejections}};
}

/// Lower-case hex SHA-256 of `data`.
inline std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw std::runtime_error("sha256: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xF];
    }
    return out;
}

/// Writes text files under one root and remembers their digests.
class ArtifactSink {
public:
    explicit ArtifactSink(std::filesystem::path root) : root_(std::move(root)) {}

    void write(const std::filesystem::path& relative, const std::string& content) {
        const auto path = root_ / relative;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << content;
        files_.push_back({relative.generic_string(), sha256_hex(content), content.size()});
    }

    void write_json(const std::filesystem::path& relative, const json& j) { write(relative, j.dump(2) + "\n"); }

    [[nodiscard]] json manifest_entries() const {
        json arr = json::array();
        for (const auto& f : files_) arr.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
        return arr;
    }

    void absorb(const ArtifactSink& other, const std::filesystem::path& prefix) {
        for (const auto& f : other.files_) files_.push_back({(prefix / f.path).generic_string(), f.sha256, f.bytes});
    }

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

private:
    struct Entry {
        std::string path;
        std::string sha256;
        std::size_t bytes;
    };
    std::filesystem::path root_;
    std::vector<Entry> files_;
};

}  // namespace ftl::harness
