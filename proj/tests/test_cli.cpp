// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/cli/commands.hpp>
#include <multibaker/cli/config.hpp>
#include <multibaker/cli/output.hpp>
#include <multibaker/spectral_stats.hpp>

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace multibaker;
using namespace multibaker::cli;
namespace fs = std::filesystem;

namespace {

using Rows = std::vector<std::vector<std::string>>;

Rows parse_csv(const std::string& text, std::string* header = nullptr) {
    Rows rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            if (header) *header = line;
            first = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::string& file(const CommandResult& r, const std::string& name) {
    const OutputFile* f = r.find(name);
    REQUIRE_MESSAGE(f != nullptr, "missing output " << name);
    return f->contents;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("multibaker_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(MULTIBAKER_TOOL) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig config_for(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    return c;
}

// Quantum and classical p(x, t) keyed by (t, x) from pxt.csv.
struct Pxt {
    std::map<std::pair<int, int>, double> quantum, classical, diff;
};

Pxt read_pxt(const std::string& text) {
    Pxt out;
    for (const auto& r : parse_csv(text)) {
        const std::pair<int, int> key{std::stoi(r[0]), std::stoi(r[1])};
        out.quantum[key] = std::stod(r[2]);
        out.classical[key] = std::stod(r[3]);
        out.diff[key] = std::stod(r[4]);
    }
    return out;
}

double mean_at(const std::map<std::pair<int, int>, double>& p, int t) {
    double acc = 0.0;
    for (const auto& [key, v] : p)
        if (key.first == t) acc += key.second * v;
    return acc;
}

}  // namespace

TEST_CASE("real formatting") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-0.0) == "0");
    CHECK(format_real(0.375) == "0.375");
    CHECK(std::stod(format_real(0.1)) == 0.1);
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv table") {
    CsvTable t({"a", "b", "c"});
    t.row(1, 0.5, std::string("x"));
    CHECK(t.text() == "a,b,c\n1,0.5,x\n");
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("svg has one label per series") {
    const std::string svg = render_svg({"t", "x", "y", {{"one", {0, 1}, {0, 1}, true}, {"two & more", {0}, {2}, false}}});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find(">one<") != std::string::npos);
    CHECK(svg.find("two &amp; more") != std::string::npos);
}

TEST_CASE("config file parsing") {
    const ExperimentConfig c = parse_config_text(
        "# sweep\nexperiment = current-sweep\nD = 40  # cell\nD1_range = 20:39\n"
        "delta_p = 2, 4\nn_k = 64\nsvg = true\n\n");
    CHECK(c.kind == ExperimentKind::current_sweep);
    CHECK(c.D == 40);
    CHECK(c.D1_range == D1Range{20, 39});
    CHECK(c.delta_p == std::vector<int>{2, 4});
    CHECK(c.n_k == 64);
    CHECK(c.svg);
    CHECK_THROWS_AS(parse_config_text("D 40\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("colour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("D = forty\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("D = 4.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("experiment = plot\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("D1_range = 9:3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("svg = maybe\n"), ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/multibaker.cfg"), ConfigError);
}

TEST_CASE("config round-trips through its file form") {
    std::mt19937_64 rng(99);
    auto coin = [&] { return rng() % 2 == 0; };
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const std::vector<ExperimentKind> kinds{ExperimentKind::current_sweep, ExperimentKind::spectrum,
                                            ExperimentKind::level_stats, ExperimentKind::evolve};
    for (int trial = 0; trial < 500; ++trial) {
        ExperimentConfig c;
        c.kind = kinds[rng() % 4];
        if (coin()) c.D = 2 * pick(1, 200);
        if (coin()) {
            for (int i = pick(1, 4); i > 0; --i) c.D1.push_back(pick(1, 300));
        } else if (coin()) {
            const int lo = pick(1, 100);
            c.D1_range = D1Range{lo, lo + pick(0, 100)};
        }
        if (coin())
            for (int i = pick(1, 3); i > 0; --i) c.delta_p.push_back(pick(1, 100));
        if (coin()) c.dp_width = std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
        if (coin()) c.n_k = pick(1, 4096);
        if (coin()) c.t_max = pick(1, 4000);
        if (coin()) c.mc_samples = static_cast<std::int64_t>(rng() >> 20);
        if (coin()) c.seed = rng();
        if (coin()) c.out = "runs/out_" + std::to_string(pick(0, 999));
        c.svg = coin();
        c.full_range = coin();
        if (coin()) c.panel_t = pick(0, 10);
        if (coin()) c.husimi_resolution = pick(2, 1024);
        const std::string text = to_config_text(c);
        CAPTURE(text);
        CHECK(parse_config_text(text) == c);
    }
}

TEST_CASE("resolve defaults") {
    SUBCASE("current sweep") {
        const ResolvedConfig r = resolve(config_for(ExperimentKind::current_sweep));
        REQUIRE(r.sweeps.size() == 1);
        CHECK(r.sweeps[0].D == 100);
        CHECK(r.sweeps[0].D1.front() == 50);
        CHECK(r.sweeps[0].D1.back() == 99);
        CHECK(r.sweeps[0].delta_p == std::vector<int>{10});
        CHECK(r.n_k == 256);
    }
    SUBCASE("full range") {
        ExperimentConfig c = config_for(ExperimentKind::current_sweep);
        c.full_range = true;
        const ResolvedConfig r = resolve(c);
        REQUIRE(r.sweeps.size() == 28);
        CHECK(r.sweeps.back().D == 290);
        CHECK(r.sweeps.back().delta_p == std::vector<int>{29});
        c.D = 40;
        CHECK_THROWS_AS(resolve(c), ConfigError);
    }
    SUBCASE("level stats") {
        const ResolvedConfig r = resolve(config_for(ExperimentKind::level_stats));
        CHECK(r.sweeps[0].D1 == std::vector<int>{15, 16, 26, 29});
    }
    SUBCASE("evolve") {
        const ResolvedConfig r = resolve(config_for(ExperimentKind::evolve));
        CHECK(r.sweeps[0].D == 20);
        CHECK(r.sweeps[0].D1 == std::vector<int>{15});
        CHECK(r.sweeps[0].delta_p == std::vector<int>{2});
        CHECK(r.t_max == 80);
        CHECK(r.panel_t == 3);
        CHECK(r.panel_cells == std::vector<int>{-3, -1, 1, 3});
        CHECK(r.husimi_resolution == 64);
        CHECK(r.seed == 1);
    }
}

TEST_CASE("resolve rejects inconsistent configs") {
    auto bad = [](auto edit, ExperimentKind kind = ExperimentKind::current_sweep) {
        ExperimentConfig c = config_for(kind);
        edit(c);
        CHECK_THROWS_AS(resolve(c), ConfigError);
    };
    bad([](ExperimentConfig& c) { c.D = 21; });
    bad([](ExperimentConfig& c) { c.D = 0; });
    bad([](ExperimentConfig& c) { c.D1_range = D1Range{50, 100}; });
    bad([](ExperimentConfig& c) { c.D1 = {0}; });
    bad([](ExperimentConfig& c) { c.D1 = {60}, c.D1_range = D1Range{50, 60}; });
    bad([](ExperimentConfig& c) { c.delta_p = {0}; });
    bad([](ExperimentConfig& c) { c.delta_p = {101}; });
    bad([](ExperimentConfig& c) { c.n_k = 0; });
    bad([](ExperimentConfig& c) { c.t_max = 0; });
    bad([](ExperimentConfig& c) { c.t_max = 5000; });
    bad([](ExperimentConfig& c) { c.mc_samples = -1; });
    bad([](ExperimentConfig& c) { c.husimi_resolution = 1; });
    bad([](ExperimentConfig& c) { c.dp_width = 0.0; });
    bad([](ExperimentConfig& c) { c.full_range = true; }, ExperimentKind::evolve);
    bad([](ExperimentConfig& c) { c.D1 = {10, 12}; }, ExperimentKind::spectrum);
    bad([](ExperimentConfig& c) { c.D1 = {10, 12}; }, ExperimentKind::evolve);
    bad([](ExperimentConfig& c) { c.delta_p = {2, 4}; }, ExperimentKind::evolve);
    bad([](ExperimentConfig& c) { c.D = 80, c.dp_width = 0.1, c.delta_p = {4}; }, ExperimentKind::evolve);
    ExperimentConfig ok = config_for(ExperimentKind::evolve);
    ok.D = 80;
    ok.dp_width = 0.1;
    CHECK(resolve(ok).sweeps[0].delta_p == std::vector<int>{8});
}

TEST_CASE("current sweep output") {
    ExperimentConfig c = config_for(ExperimentKind::current_sweep);
    c.D = 20;
    c.D1_range = D1Range{10, 19};
    c.delta_p = {2, 20};
    c.n_k = 32;
    c.svg = true;
    const CommandResult r = run_experiment(resolve(c), 2);
    std::string header;
    const Rows rows = parse_csv(file(r, "current_sweep.csv"), &header);
    CHECK(header == "D,D1,s,delta_p_states,n_k,J_inf");
    REQUIRE(rows.size() == 20);
    for (const auto& row : rows) {
        const int D1 = std::stoi(row[1]), dp = std::stoi(row[3]);
        const double J = std::stod(row[5]);
        CHECK(std::stod(row[2]) == D1 / 20.0);
        CHECK(row[4] == "32");
        if (D1 == 10 || dp == 20) CHECK(std::abs(J) < 1e-10);
    }
    CHECK(r.find("current_sweep.svg") != nullptr);
}

TEST_CASE("spectrum output") {
    ExperimentConfig c = config_for(ExperimentKind::spectrum);
    c.D1 = {29};
    c.n_k = 16;
    const CommandResult r = run_experiment(resolve(c), 1);
    std::string header;
    const Rows rows = parse_csv(file(r, "spectrum.csv"), &header);
    CHECK(header == "k_index,k,level_index,theta");
    REQUIRE(rows.size() == 16 * 30);
    std::map<int, std::vector<double>> by_k;
    for (const auto& row : rows) by_k[std::stoi(row[0])].push_back(std::stod(row[3]));
    for (auto& [k, thetas] : by_k) {
        CHECK(thetas.size() == 30);
        CHECK(std::is_sorted(thetas.begin(), thetas.end()));
    }
    CHECK(r.notes.at("min_normalized_spacing").get<double>() > 0.0);
    CHECK(r.find("spectrum.svg") == nullptr);
}

TEST_CASE("level statistics output") {
    ExperimentConfig c = config_for(ExperimentKind::level_stats);
    c.n_k = 64;
    const CommandResult r = run_experiment(resolve(c), 1);
    for (int d1 : {15, 16, 26, 29}) {
        std::string header;
        const Rows rows = parse_csv(file(r, "level_stats_D1_" + std::to_string(d1) + ".csv"), &header);
        CHECK(header == "theta,I_empirical,I_poisson,I_cue");
        REQUIRE(rows.size() == 401);
        double last = 0.0;
        for (const auto& row : rows) {
            const double x = std::stod(row[0]);
            CHECK(std::stod(row[2]) == reference_cumulative(SpacingLaw::poisson, x));
            CHECK(std::stod(row[3]) == reference_cumulative(SpacingLaw::cue, x));
            CHECK(std::stod(row[1]) >= last);
            last = std::stod(row[1]);
        }
    }
    const auto summary = nlohmann::json::parse(file(r, "level_stats_summary.json"));
    CHECK(summary.at("closest_to_poisson") == 29);
    CHECK(summary.at("D1_by_ks_poisson").front() == 29);

    c.D1 = {29};
    const CommandResult single = run_experiment(resolve(c), 1);
    CHECK(single.find("level_stats.csv") != nullptr);
}

TEST_CASE("evolve output") {
    SUBCASE("classical column matches the hand fixture") {
        ExperimentConfig c = config_for(ExperimentKind::evolve);
        c.t_max = 4;
        c.husimi_resolution = 8;
        const CommandResult r = run_experiment(resolve(c), 1);
        std::string header;
        parse_csv(file(r, "pxt.csv"), &header);
        CHECK(header == "t,x,p_quantum,p_classical,diff");
        const Pxt p = read_pxt(file(r, "pxt.csv"));
        CHECK(p.classical.at({2, 2}) == 0.375);
        CHECK(p.classical.at({2, 0}) == 0.25);
        CHECK(p.classical.at({2, -2}) == 0.375);
        CHECK(p.quantum.size() == 25);
        for (const auto& [key, q] : p.quantum) CHECK(p.diff.at(key) == doctest::Approx(q - p.classical.at(key)));
        for (int x : {-3, -1, 1, 3}) {
            const Rows panel = parse_csv(file(r, "husimi_x" + std::to_string(x) + ".csv"));
            CHECK(panel.size() == 64);
        }
        const auto summary = nlohmann::json::parse(file(r, "evolve_summary.json"));
        CHECK(summary.at("classical_method") == "exact");
        double mass = 0.0;
        for (const auto& panel : summary.at("panels")) mass += panel.at("mass").get<double>();
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("symmetric map stays balanced and close to classical") {
        for (int D : {20, 40}) {
            ExperimentConfig c = config_for(ExperimentKind::evolve);
            c.D = D;
            c.D1 = {D / 2};
            c.t_max = 3;
            const Pxt p = read_pxt(file(run_experiment(resolve(c), 1), "pxt.csv"));
            double worst = 0.0;
            for (const auto& [key, d] : p.diff) worst = std::max(worst, std::abs(d));
            CHECK(worst < 0.05);
            for (int t = 0; t <= 3; ++t) CHECK(std::abs(mean_at(p.quantum, t)) < 1e-10);
        }
    }
    SUBCASE("short-time imbalance shrinks with D") {
        auto mean3 = [](int D) {
            ExperimentConfig c = config_for(ExperimentKind::evolve);
            c.D = D;
            c.D1 = {3 * D / 4};
            c.dp_width = 0.1;
            c.t_max = 3;
            return std::abs(mean_at(read_pxt(file(run_experiment(resolve(c), 1), "pxt.csv")).quantum, 3));
        };
        CHECK(mean3(20) > mean3(80));
    }
    SUBCASE("monte carlo classical column") {
        ExperimentConfig c = config_for(ExperimentKind::evolve);
        c.t_max = 3;
        c.mc_samples = 100000;
        c.seed = 5;
        const CommandResult r = run_experiment(resolve(c), 1);
        const auto summary = nlohmann::json::parse(file(r, "evolve_summary.json"));
        CHECK(summary.at("classical_method") == "monte-carlo");
        CHECK(summary.at("seed") == 5);
        CHECK(summary.at("rng") == "std::mt19937_64");
        const Pxt p = read_pxt(file(r, "pxt.csv"));
        CHECK(p.classical.at({2, 0}) == doctest::Approx(0.25).epsilon(0.05));
    }
}

TEST_CASE("manifest lists every file with its checksum") {
    const fs::path dir = scratch_dir("manifest");
    ExperimentConfig c = config_for(ExperimentKind::spectrum);
    c.D = 10;
    c.n_k = 4;
    c.out = dir.string();
    const ResolvedConfig resolved = resolve(c);
    const CommandResult r = run_experiment(resolved, 1);
    const nlohmann::json manifest = write_outputs(c, resolved, r, 0.5, 1);
    CHECK(manifest.at("config") == to_config_text(c));
    CHECK(manifest.at("experiment") == "spectrum");
    CHECK(manifest.at("outputs").size() == r.files.size());
    for (const auto& entry : manifest.at("outputs")) {
        const std::string contents = slurp(dir / entry.at("file").get<std::string>());
        CHECK(entry.at("sha256") == sha256_hex(contents));
    }
    CHECK(nlohmann::json::parse(slurp(dir / "manifest.json")) == manifest);
    fs::remove_all(dir);
}

TEST_CASE("command line runs are deterministic") {
    const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    const std::string common = "evolve --D 20 --t-max 6 --mc-samples 5000 --seed 11 --husimi-resolution 16 --out ";
    REQUIRE(run_tool(common + a.string()) == kExitOk);
    REQUIRE(run_tool("evolve --t-max 6 --D 20 --mc-samples 5000 --seed 11 --husimi-resolution 16 --out " +
                     b.string()) == kExitOk);
    for (const char* name : {"pxt.csv", "husimi_x-1.csv", "husimi_x3.csv", "evolve_summary.json"})
        CHECK(slurp(a / name) == slurp(b / name));
    const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    CHECK(ma.at("outputs") == mb.at("outputs"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("config files and flag overrides") {
    const fs::path dir = scratch_dir("cfg");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "experiment = spectrum\nD = 10\nn_k = 4\nD1 = 7\n";
    }
    const fs::path out = dir / "out";
    REQUIRE(run_tool("spectrum --config " + (dir / "run.cfg").string() + " --D1 9 --out " + out.string()) ==
            kExitOk);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    const ExperimentConfig used = parse_config_text(manifest.at("config").get<std::string>());
    CHECK(used.D == 10);
    CHECK(used.D1 == std::vector<int>{9});
    CHECK(parse_csv(slurp(out / "spectrum.csv")).size() == 40);
    CHECK(run_tool("evolve --config " + (dir / "run.cfg").string() + " --out " + out.string()) == kExitUsage);
    fs::remove_all(dir);
}

TEST_CASE("invalid configurations fail before computing") {
    const fs::path dir = scratch_dir("invalid");
    CHECK(run_tool("current-sweep --D 21 --out " + dir.string()) == kExitUsage);
    CHECK(run_tool("current-sweep --D 20 --D1-range 5:25 --out " + dir.string()) == kExitUsage);
    CHECK(run_tool("evolve --D 20 --D1 13,15 --out " + dir.string()) == kExitUsage);
    CHECK(run_tool("spectrum --n-k zero --out " + dir.string()) == kExitUsage);
    CHECK(run_tool("level-stats --config /nonexistent.cfg --out " + dir.string()) == kExitUsage);
    CHECK(run_tool("transmogrify") == kExitUsage);
    CHECK(run_tool("") == kExitUsage);
    CHECK_FALSE(fs::exists(dir));
    CHECK(run_tool("--help") == kExitOk);
}
