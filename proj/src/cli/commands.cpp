// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/cli/commands.hpp>

#include <multibaker/classical_baker.hpp>
#include <multibaker/cli/output.hpp>
#include <multibaker/errors.hpp>
#include <multibaker/husimi.hpp>
#include <multibaker/parallel.hpp>
#include <multibaker/quantum_transport.hpp>
#include <multibaker/spectral_stats.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <regex>

#ifndef MULTIBAKER_VERSION
#define MULTIBAKER_VERSION "0.0.0"
#endif

namespace multibaker::cli {

namespace {

constexpr int kExactClassicalLimit = 128;
constexpr std::int64_t kFallbackSamples = 1'000'000;

const ResolvedSweep& single_sweep(const ResolvedConfig& config) {
    if (config.sweeps.size() != 1) throw ConfigError("this experiment runs a single cell dimension");
    return config.sweeps.front();
}

std::string panel_name(int x) { return fmt::format("husimi_x{}.csv", x); }

}  // namespace

const OutputFile* CommandResult::find(const std::string& name) const {
    const auto it = std::find_if(files.begin(), files.end(), [&](const OutputFile& f) { return f.name == name; });
    return it == files.end() ? nullptr : &*it;
}

CommandResult run_current_sweep(const ResolvedConfig& config, int threads) {
    struct Job {
        int D;
        int D1;
        const std::vector<int>* delta_p;
    };
    std::vector<Job> jobs;
    for (const auto& sweep : config.sweeps)
        for (int d1 : sweep.D1) jobs.push_back({sweep.D, d1, &sweep.delta_p});

    const KGrid grid(config.n_k);
    std::vector<std::vector<AsymptoticCurrent>> results(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const Job& job = jobs[i];
        std::vector<CellDensity> rhos;
        for (int dp : *job.delta_p) rhos.push_back(central_momentum_mixture(job.D, dp));
        results[i] = asymptotic_currents(rhos, CellDims(job.D, job.D1), grid);
    });

    CsvTable csv({"D", "D1", "s", "delta_p_states", "n_k", "J_inf"});
    int degenerate = 0;
    std::map<std::pair<int, int>, PlotSeries> curves;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        for (std::size_t r = 0; r < job.delta_p->size(); ++r) {
            const int dp = (*job.delta_p)[r];
            const double s = static_cast<double>(job.D1) / job.D;
            csv.row(job.D, job.D1, s, dp, config.n_k, results[i][r].value);
            degenerate += results[i][r].degenerate_clusters;
            auto& curve = curves[{job.D, dp}];
            curve.label = fmt::format("D={} dp={}", job.D, dp);
            curve.x.push_back(s);
            curve.y.push_back(results[i][r].value);
        }
    }

    CommandResult out;
    out.files.push_back({"current_sweep.csv", csv.text()});
    out.notes["degenerate_clusters"] = degenerate;
    if (config.svg) {
        PlotSpec plot{"Asymptotic current", "s = D1/D", "J_inf", {}};
        for (auto& [key, series] : curves) plot.series.push_back(std::move(series));
        out.files.push_back({"current_sweep.svg", render_svg(plot)});
    }
    return out;
}

CommandResult run_spectrum(const ResolvedConfig& config, int threads) {
    const ResolvedSweep& sweep = single_sweep(config);
    const CellDims dims(sweep.D, sweep.D1.front());
    const KGrid grid(config.n_k);
    const EigenphaseBands bands = eigenphase_bands(dims, grid, threads);

    CsvTable csv({"k_index", "k", "level_index", "theta"});
    for (int j = 0; j < grid.size(); ++j)
        for (int l = 0; l < dims.D(); ++l) csv.row(j, grid.node(j), l, bands.thetas(j, l));

    CommandResult out;
    out.files.push_back({"spectrum.csv", csv.text()});
    const SpacingSample sample = spacing_sample(bands);
    out.notes["min_normalized_spacing"] = sample.spacings.minCoeff();
    if (config.svg) {
        PlotSeries points{fmt::format("D={} D1={}", dims.D(), dims.D1()), {}, {}, true};
        for (int j = 0; j < grid.size(); ++j)
            for (int l = 0; l < dims.D(); ++l) {
                points.x.push_back(grid.node(j) / std::numbers::pi);
                points.y.push_back(bands.thetas(j, l) / std::numbers::pi);
            }
        out.files.push_back({"spectrum.svg", render_svg({"Eigenphases", "k / pi", "theta / pi", {points}})});
    }
    return out;
}

CommandResult run_level_stats(const ResolvedConfig& config, int threads) {
    const ResolvedSweep& sweep = single_sweep(config);
    const KGrid grid(config.n_k);
    const std::vector<double> abscissae = default_abscissae();

    CommandResult out;
    nlohmann::json summary{{"D", sweep.D}, {"n_k", config.n_k}, {"results", nlohmann::json::array()}};
    PlotSpec plot{"Cumulative level spacing", "spacing / mean spacing", "I", {}};
    std::vector<std::pair<double, int>> by_poisson;
    for (int d1 : sweep.D1) {
        const CellDims dims(sweep.D, d1);
        const CumulativeCurve curve = cumulative_curve(spacing_sample(eigenphase_bands(dims, grid, threads)), abscissae);
        CsvTable csv({"theta", "I_empirical", "I_poisson", "I_cue"});
        for (std::size_t i = 0; i < abscissae.size(); ++i)
            csv.row(abscissae[i], curve.values[i], reference_cumulative(SpacingLaw::poisson, abscissae[i]),
                    reference_cumulative(SpacingLaw::cue, abscissae[i]));
        const std::string name =
            sweep.D1.size() == 1 ? "level_stats.csv" : fmt::format("level_stats_D1_{}.csv", d1);
        out.files.push_back({name, csv.text()});

        const double ks_cue = ks_distance(curve, SpacingLaw::cue);
        const double ks_poisson = ks_distance(curve, SpacingLaw::poisson);
        summary["results"].push_back({{"D1", d1},
                                      {"file", name},
                                      {"ks_cue", ks_cue},
                                      {"ks_poisson", ks_poisson},
                                      {"closer_to", ks_cue < ks_poisson ? "cue" : "poisson"}});
        by_poisson.emplace_back(ks_poisson, d1);
        plot.series.push_back({fmt::format("D1={}", d1), abscissae, curve.values, false});
    }
    std::sort(by_poisson.begin(), by_poisson.end());
    nlohmann::json order = nlohmann::json::array();
    for (const auto& [ks, d1] : by_poisson) order.push_back(d1);
    summary["D1_by_ks_poisson"] = order;
    summary["closest_to_poisson"] = by_poisson.front().second;
    out.files.push_back({"level_stats_summary.json", dump_json(summary)});

    if (config.svg) {
        std::vector<double> poisson, cue;
        for (double x : abscissae) {
            poisson.push_back(reference_cumulative(SpacingLaw::poisson, x));
            cue.push_back(reference_cumulative(SpacingLaw::cue, x));
        }
        plot.series.push_back({"Poisson", abscissae, poisson, false});
        plot.series.push_back({"CUE", abscissae, cue, false});
        out.files.push_back({"level_stats.svg", render_svg(plot)});
    }
    return out;
}

CommandResult run_evolve(const ResolvedConfig& config, int threads) {
    const ResolvedSweep& sweep = single_sweep(config);
    const CellDims dims(sweep.D, sweep.D1.front());
    const int dp = sweep.delta_p.front();
    const int t_max = config.t_max;
    const CellDensity rho = central_momentum_mixture(dims.D(), dp);

    const LatticeEvolution quantum = evolve_lattice(rho, dims, t_max, threads);

    const bool use_exact = config.mc_samples == 0 && t_max <= kExactClassicalLimit;
    const std::int64_t samples = config.mc_samples > 0 ? config.mc_samples : kFallbackSamples;
    const ClassicalTable classical =
        use_exact ? exact_distribution(dims.D1(), dims.D(), t_max, kExactClassicalLimit)
                  : monte_carlo_distribution(dims.s(), t_max, samples, config.seed,
                                             static_cast<double>(dp) / dims.D());

    CsvTable pxt({"t", "x", "p_quantum", "p_classical", "diff"});
    for (int t = 0; t <= t_max; ++t)
        for (int x = -t; x <= t; ++x) {
            const double pq = quantum.table.at(t, x), pc = classical.at(t, x);
            pxt.row(t, x, pq, pc, pq - pc);
        }

    CommandResult out;
    out.files.push_back({"pxt.csv", pxt.text()});

    const LatticeEvolution panels_run = evolve_lattice(rho, dims, config.panel_t, threads);
    const auto panels = lattice_husimi(panels_run.components, config.panel_cells, config.husimi_resolution);
    nlohmann::json panel_notes = nlohmann::json::array();
    for (const auto& panel : panels) {
        const double peak = panel.values.maxCoeff();
        CsvTable csv({"qi", "pi", "value"});
        for (int i = 0; i < panel.resolution; ++i)
            for (int j = 0; j < panel.resolution; ++j)
                csv.row(i, j, peak > 0.0 ? panel.values(i, j) / peak : 0.0);
        out.files.push_back({panel_name(panel.cell), csv.text()});
        panel_notes.push_back({{"x", panel.cell}, {"mass", panel.mass}, {"peak", peak}});
    }

    const CurrentSeries series = current_series(quantum.table);
    nlohmann::json summary{{"D", dims.D()},
                           {"D1", dims.D1()},
                           {"s", dims.s()},
                           {"delta_p_states", dp},
                           {"t_max", t_max},
                           {"classical_method", use_exact ? "exact" : "monte-carlo"},
                           {"mean_x_quantum", quantum.table.mean(t_max)},
                           {"mean_x_classical", classical.mean(t_max)},
                           {"late_current_mean", series.asymptotic},
                           {"late_current_stderr", series.standard_error},
                           {"panel_t", config.panel_t},
                           {"husimi_resolution", config.husimi_resolution},
                           {"panels", panel_notes}};
    if (!use_exact) {
        summary["mc_samples"] = samples;
        summary["seed"] = config.seed;
        summary["rng"] = classical.metadata.at("rng");
    }
    out.files.push_back({"evolve_summary.json", dump_json(summary)});

    if (config.svg) {
        PlotSeries q{fmt::format("quantum D={}", dims.D()), {}, {}, false};
        PlotSeries c{"classical", {}, {}, false};
        for (int x = -t_max; x <= t_max; x += 2) {
            const int xx = (t_max % 2 == 0) ? x : x + 1;
            if (xx > t_max) break;
            q.x.push_back(xx);
            q.y.push_back(quantum.table.at(t_max, xx));
            c.x.push_back(xx);
            c.y.push_back(classical.at(t_max, xx));
        }
        out.files.push_back(
            {"pxt.svg", render_svg({fmt::format("p(x, t={}) at s={}", t_max, dims.s()), "x", "p", {q, c}})});
    }
    return out;
}

CommandResult run_experiment(const ResolvedConfig& config, int threads) {
    switch (config.kind) {
        case ExperimentKind::current_sweep: return run_current_sweep(config, threads);
        case ExperimentKind::spectrum: return run_spectrum(config, threads);
        case ExperimentKind::level_stats: return run_level_stats(config, threads);
        case ExperimentKind::evolve: return run_evolve(config, threads);
    }
    throw ConfigError("unknown experiment");
}

nlohmann::json write_outputs(const ExperimentConfig& config, const ResolvedConfig& resolved,
                             const CommandResult& result, double wall_seconds, int threads) {
    namespace fs = std::filesystem;
    const fs::path dir(resolved.out);
    fs::create_directories(dir);

    nlohmann::json manifest{{"experiment", to_string(config.kind)},
                            {"version", MULTIBAKER_VERSION},
                            {"config", to_config_text(config)},
                            {"wall_clock_seconds", wall_seconds},
                            {"threads", threads},
                            {"notes", result.notes},
                            {"outputs", nlohmann::json::array()}};
    for (const auto& file : result.files) {
        std::ofstream os(dir / file.name, std::ios::binary);
        os << file.contents;
        if (!os) throw std::runtime_error("failed to write " + (dir / file.name).string());
        manifest["outputs"].push_back(
            {{"file", file.name}, {"bytes", file.contents.size()}, {"sha256", sha256_hex(file.contents)}});
    }
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    os << dump_json(manifest);
    return manifest;
}

int run_main(int argc, const char* const* argv) {
    CLI::App app{"Classical and quantum asymmetric multibaker map experiments"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::optional<int> D, n_k, t_max, panel_t, husimi_resolution;
        std::string D1, D1_range, delta_p;
        std::optional<double> dp_width;
        std::optional<std::int64_t> mc_samples;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        bool svg = false;
        bool full_range = false;
    } flags;

    std::vector<std::pair<CLI::App*, ExperimentKind>> subs;
    auto add = [&](const char* name, const char* help, ExperimentKind kind) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "key = value config file; flags override it");
        sub->add_option("--D", flags.D, "cell Hilbert-space dimension (even)");
        sub->add_option("--D1", flags.D1, "D1 value or comma list");
        sub->add_option("--D1-range", flags.D1_range, "inclusive D1 range lo:hi");
        sub->add_option("--delta-p", flags.delta_p, "number of central momentum states (comma list)");
        sub->add_option("--dp-width", flags.dp_width, "momentum band width; delta-p = round(D * width)");
        sub->add_option("--n-k", flags.n_k, "k quadrature nodes");
        sub->add_option("--t-max", flags.t_max, "evolution time (default 4 D)");
        sub->add_option("--mc-samples", flags.mc_samples, "Monte Carlo particles for the classical table");
        sub->add_option("--seed", flags.seed, "Monte Carlo seed");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_flag("--svg", flags.svg, "also write SVG plots");
        if (kind == ExperimentKind::current_sweep)
            sub->add_flag("--full-range", flags.full_range, "sweep D = 20, 30, ..., 290 with delta-p = D/10");
        if (kind == ExperimentKind::evolve) {
            sub->add_option("--panel-t", flags.panel_t, "time of the Husimi panels (default 3)");
            sub->add_option("--husimi-resolution", flags.husimi_resolution, "Husimi grid points per axis");
        }
        subs.emplace_back(sub, kind);
    };
    add("current-sweep", "asymptotic current J_inf over D1 and delta-p", ExperimentKind::current_sweep);
    add("spectrum", "eigenphases of B_{s,k} over the k grid", ExperimentKind::spectrum);
    add("level-stats", "cumulative spacing distribution against Poisson and CUE", ExperimentKind::level_stats);
    add("evolve", "quantum and classical p(x, t) with Husimi panels", ExperimentKind::evolve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    ExperimentConfig config;
    ResolvedConfig resolved;
    try {
        const auto selected = std::find_if(subs.begin(), subs.end(), [](const auto& s) { return s.first->parsed(); });
        const ExperimentKind kind = selected->second;
        if (!flags.config.empty()) {
            std::ifstream in(flags.config);
            if (!in) throw ConfigError("cannot read config file " + flags.config);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            config = parse_config_text(text);
            const std::regex names_kind("^\\s*experiment\\s*=", std::regex::multiline);
            if (std::regex_search(text, names_kind) && config.kind != kind)
                throw ConfigError("config file is for experiment '" + to_string(config.kind) + "'");
        }
        config.kind = kind;
        if (flags.D) config.D = flags.D;
        if (!flags.D1.empty()) config.D1 = parse_int_list(flags.D1), config.D1_range.reset();
        if (!flags.D1_range.empty()) config.D1_range = parse_d1_range(flags.D1_range), config.D1.clear();
        if (!flags.delta_p.empty()) config.delta_p = parse_int_list(flags.delta_p);
        if (flags.dp_width) config.dp_width = flags.dp_width;
        if (flags.n_k) config.n_k = flags.n_k;
        if (flags.t_max) config.t_max = flags.t_max;
        if (flags.mc_samples) config.mc_samples = flags.mc_samples;
        if (flags.seed) config.seed = flags.seed;
        if (flags.out) config.out = flags.out;
        if (flags.svg) config.svg = true;
        if (flags.full_range) config.full_range = true;
        if (flags.panel_t) config.panel_t = flags.panel_t;
        if (flags.husimi_resolution) config.husimi_resolution = flags.husimi_resolution;
        resolved = resolve(config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const int threads = default_thread_count();
    try {
        const auto start = std::chrono::steady_clock::now();
        const CommandResult result = run_experiment(resolved, threads);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_outputs(config, resolved, result, wall, threads);
        for (const auto& f : result.files) std::cout << (std::filesystem::path(resolved.out) / f.name).string() << "\n";
        std::cout << (std::filesystem::path(resolved.out) / "manifest.json").string() << "\n";
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace multibaker::cli
