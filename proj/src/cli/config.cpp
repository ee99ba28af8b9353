// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/cli/config.hpp>

#include <multibaker/husimi.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace multibaker::cli {

namespace {

constexpr int kMaxTime = 4000;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("invalid value for " + key + ": '" + text + "'");
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const std::string t = trim(text);
        const double v = std::stod(t, &used);
        if (used != t.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid value for " + key + ": '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

std::string join(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
    return out;
}

std::vector<int> unique_sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::current_sweep: return "current-sweep";
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::level_stats: return "level-stats";
        case ExperimentKind::evolve: return "evolve";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto kind : {ExperimentKind::current_sweep, ExperimentKind::spectrum, ExperimentKind::level_stats,
                      ExperimentKind::evolve})
        if (to_string(kind) == trim(name)) return kind;
    throw ConfigError("unknown experiment '" + name + "'");
}

D1Range parse_d1_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("D1 range must look like lo:hi, got '" + text + "'");
    D1Range r{parse_number<int>("D1_range", text.substr(0, colon)),
              parse_number<int>("D1_range", text.substr(colon + 1))};
    if (r.first > r.last) throw ConfigError("D1 range is empty: '" + text + "'");
    return r;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<int>("list", item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"experiment", [&](const std::string& v) { c.kind = parse_experiment_kind(v); }},
        {"D", [&](const std::string& v) { c.D = parse_number<int>("D", v); }},
        {"D1", [&](const std::string& v) { c.D1 = parse_int_list(v); }},
        {"D1_range", [&](const std::string& v) { c.D1_range = parse_d1_range(v); }},
        {"delta_p", [&](const std::string& v) { c.delta_p = parse_int_list(v); }},
        {"dp_width", [&](const std::string& v) { c.dp_width = parse_double("dp_width", v); }},
        {"n_k", [&](const std::string& v) { c.n_k = parse_number<int>("n_k", v); }},
        {"t_max", [&](const std::string& v) { c.t_max = parse_number<int>("t_max", v); }},
        {"mc_samples", [&](const std::string& v) { c.mc_samples = parse_number<std::int64_t>("mc_samples", v); }},
        {"seed", [&](const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); }},
        {"out", [&](const std::string& v) { c.out = trim(v); }},
        {"svg", [&](const std::string& v) { c.svg = parse_bool("svg", v); }},
        {"full_range", [&](const std::string& v) { c.full_range = parse_bool("full_range", v); }},
        {"panel_t", [&](const std::string& v) { c.panel_t = parse_number<int>("panel_t", v); }},
        {"husimi_resolution",
         [&](const std::string& v) { c.husimi_resolution = parse_number<int>("husimi_resolution", v); }},
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
        const std::string key = trim(line.substr(0, eq));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
        it->second(trim(line.substr(eq + 1)));
    }
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
    std::string out = "experiment = " + to_string(c.kind) + "\n";
    if (c.D) out += fmt::format("D = {}\n", *c.D);
    if (!c.D1.empty()) out += "D1 = " + join(c.D1) + "\n";
    if (c.D1_range) out += fmt::format("D1_range = {}:{}\n", c.D1_range->first, c.D1_range->last);
    if (!c.delta_p.empty()) out += "delta_p = " + join(c.delta_p) + "\n";
    if (c.dp_width) out += fmt::format("dp_width = {:.17g}\n", *c.dp_width);
    if (c.n_k) out += fmt::format("n_k = {}\n", *c.n_k);
    if (c.t_max) out += fmt::format("t_max = {}\n", *c.t_max);
    if (c.mc_samples) out += fmt::format("mc_samples = {}\n", *c.mc_samples);
    if (c.seed) out += fmt::format("seed = {}\n", *c.seed);
    if (c.out) out += "out = " + *c.out + "\n";
    out += fmt::format("svg = {}\n", c.svg);
    out += fmt::format("full_range = {}\n", c.full_range);
    if (c.panel_t) out += fmt::format("panel_t = {}\n", *c.panel_t);
    if (c.husimi_resolution) out += fmt::format("husimi_resolution = {}\n", *c.husimi_resolution);
    return out;
}

ResolvedConfig resolve(const ExperimentConfig& c) {
    ResolvedConfig r;
    r.kind = c.kind;
    const bool sweep = c.kind == ExperimentKind::current_sweep;
    const bool evolve = c.kind == ExperimentKind::evolve;

    if (c.full_range && !sweep) throw ConfigError("full_range applies to current-sweep only");
    if (c.full_range && (c.D || !c.D1.empty() || c.D1_range || !c.delta_p.empty() || c.dp_width))
        throw ConfigError("full_range fixes D, D1 and delta_p; do not set them");

    std::vector<int> dims;
    if (c.full_range) {
        for (int D = 20; D <= 290; D += 10) dims.push_back(D);
    } else {
        int D = 0;
        switch (c.kind) {
            case ExperimentKind::current_sweep: D = 100; break;
            case ExperimentKind::spectrum:
            case ExperimentKind::level_stats: D = 30; break;
            case ExperimentKind::evolve: D = 20; break;
        }
        dims.push_back(c.D.value_or(D));
    }

    if (!c.D1.empty() && c.D1_range) throw ConfigError("give either D1 or D1_range, not both");

    for (int D : dims) {
        if (D < 2 || D % 2 != 0) throw ConfigError(fmt::format("D must be even and >= 2, got {}", D));
        ResolvedSweep job;
        job.D = D;

        if (!c.D1.empty()) {
            job.D1 = c.D1;
        } else if (c.D1_range) {
            for (int d1 = c.D1_range->first; d1 <= c.D1_range->last; ++d1) job.D1.push_back(d1);
        } else {
            switch (c.kind) {
                case ExperimentKind::current_sweep:
                    for (int d1 = D / 2; d1 <= D - 1; ++d1) job.D1.push_back(d1);
                    break;
                case ExperimentKind::spectrum: job.D1 = {D / 2}; break;
                case ExperimentKind::level_stats: job.D1 = {D / 2, D / 2 + 1, D - 4, D - 1}; break;
                case ExperimentKind::evolve:
                    job.D1 = {std::clamp(static_cast<int>(std::lround(0.75 * D)), 1, D - 1)};
                    break;
            }
            std::erase_if(job.D1, [D](int d1) { return d1 < 1 || d1 > D - 1; });
        }
        job.D1 = unique_sorted(job.D1);
        for (int d1 : job.D1)
            if (d1 < 1 || d1 > D - 1) throw ConfigError(fmt::format("D1 = {} outside [1, {}]", d1, D - 1));
        if (job.D1.empty()) throw ConfigError("no D1 values to run");
        if ((c.kind == ExperimentKind::spectrum || evolve) && job.D1.size() != 1)
            throw ConfigError(to_string(c.kind) + " takes exactly one D1");

        std::optional<int> from_width;
        if (c.dp_width) {
            if (!(*c.dp_width > 0.0 && *c.dp_width <= 1.0)) throw ConfigError("dp_width must lie in (0, 1]");
            from_width = static_cast<int>(std::lround(D * *c.dp_width));
        }
        if (!c.delta_p.empty()) {
            job.delta_p = unique_sorted(c.delta_p);
            if (from_width && (job.delta_p.size() != 1 || job.delta_p.front() != *from_width))
                throw ConfigError(fmt::format("delta_p must equal round(D * dp_width) = {}", *from_width));
        } else if (from_width) {
            job.delta_p = {*from_width};
        } else {
            job.delta_p = {std::max(1, D / 10)};
        }
        for (int dp : job.delta_p)
            if (dp < 1 || dp > D) throw ConfigError(fmt::format("delta_p = {} outside [1, {}]", dp, D));
        if (evolve && job.delta_p.size() != 1) throw ConfigError("evolve takes exactly one delta_p");

        r.sweeps.push_back(std::move(job));
    }

    r.n_k = c.n_k.value_or(256);
    if (r.n_k < 1) throw ConfigError("n_k must be positive");
    r.t_max = c.t_max.value_or(4 * dims.front());
    if (r.t_max < 1 || r.t_max > kMaxTime)
        throw ConfigError(fmt::format("t_max must lie in [1, {}], got {}", kMaxTime, r.t_max));
    r.mc_samples = c.mc_samples.value_or(0);
    if (r.mc_samples < 0) throw ConfigError("mc_samples must be non-negative");
    r.seed = c.seed.value_or(1);
    r.out = c.out.value_or(".");
    r.svg = c.svg;
    r.panel_t = c.panel_t.value_or(3);
    if (r.panel_t < 0 || r.panel_t > kMaxTime) throw ConfigError("panel_t out of range");
    r.panel_cells = {-3, -1, 1, 3};
    r.husimi_resolution = c.husimi_resolution.value_or(default_husimi_resolution(dims.front()));
    if (r.husimi_resolution < 2 || r.husimi_resolution > 1024)
        throw ConfigError("husimi_resolution must lie in [2, 1024]");
    return r;
}

}  // namespace multibaker::cli
