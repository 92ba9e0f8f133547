#include "doctest.h"

#include "qpfisher/config.hpp"
#include "qpfisher/corpus.hpp"
#include "qpfisher/error.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qpf;
namespace fs = std::filesystem;

namespace {

const char *golden_config = R"({
  "states": [
    {"id": "g", "family": "gaussian", "sigma": 1.0},
    {"id": "chirp", "family": "chirped_gaussian", "sigma": 1.0, "alpha": 0.5},
    {"id": "cubic", "family": "cubic_phase_gaussian", "sigma": 1.0, "beta": 0.3333333333333333}
  ],
  "grid": {"x_min": -10, "x_max": 10, "n_points": 4096}
})";

std::string config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::config_parse);
        return e.what();
    }
    FAIL("config was accepted");
    return {};
}

fs::path scratch(const std::string &name) {
    const fs::path p = fs::path(QPFISHER_TEST_TMP) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path &p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string> &header, const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
}

int run_cli(const std::string &args, const fs::path &log) {
    const std::string cmd = std::string("\"") + QPFISHER_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

fs::path write_config(const fs::path &dir, const std::string &name, const std::string &text) {
    const fs::path p = dir / (name + ".json");
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("config errors carry context") {
    const auto syntax = config_error("{\n  \"states\": [\n    {\"family\": \"gaussian\",}\n  ]\n}");
    CHECK(syntax.find("line 3") != std::string::npos);
    CHECK(syntax.find("column") != std::string::npos);

    const auto bad_value = config_error(
        R"({"states": [{"family": "gaussian"}, {"family": "gaussian", "sigma": -1}]})");
    CHECK(bad_value.find("states[1]") != std::string::npos);

    const auto unknown = config_error(R"({"states": [{"family": "gaussian", "sigmaa": 1}]})");
    CHECK(unknown.find("states[0].sigmaa") != std::string::npos);

    CHECK(config_error(R"({"states": []})").find("states") != std::string::npos);
    CHECK(config_error(R"({"states": [{"family": "gaussian"}], "grid": {"x_min": -5}})").find("grid") !=
          std::string::npos);
    CHECK(config_error(R"({"states": [{"family": "gaussian"}], "tolerances": {"tol_identity": 0}})")
              .find("tolerances.tol_identity") != std::string::npos);
    CHECK(config_error(R"({"states": [{"family": "gaussian"}], "dynamics": {"potential": {"kind": "harmonic", "omega": -1}, "t_final": 1}})")
              .find("dynamics") != std::string::npos);
    CHECK(config_error(R"({"states": [{"family": "gaussian"}], "colour": 1})").find("colour") != std::string::npos);
}

TEST_CASE("config defaults and hash") {
    const auto cfg = parse_config(R"({"states": [{"family": "ho_eigenstate", "n": 2}]})");
    CHECK(cfg.states.size() == 1);
    CHECK(cfg.grid.n_points == 4096);
    CHECK_FALSE(cfg.grid.x_min);
    CHECK(cfg.physics.hbar == 1.0);
    CHECK(cfg.tolerances.tol_identity == 1e-6);
    CHECK_FALSE(cfg.dynamics);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    // Whitespace does not change the hash of the parsed document.
    const auto a = parse_config(golden_config);
    const auto b = parse_config(std::string(golden_config) + "\n\n");
    CHECK(a.canonical == b.canonical);
}

TEST_CASE("golden corpus") {
    const auto result = run_corpus(parse_config(golden_config));
    REQUIRE(result.records.size() == 3);
    CHECK(result.summary.n_states == 3);
    CHECK(result.summary.n_chain_ok == 3);
    CHECK(result.summary.n_errored == 0);
    CHECK(result.summary.exit_code == exit_ok);
    CHECK(result.records[0].id == "g");
    CHECK(result.records[1].id == "chirp");
    CHECK(result.records[2].id == "cubic");
    CHECK(std::abs(result.records[0].bounds->product - 0.25) < 1e-8);
    CHECK(std::abs(result.records[1].bounds->product - 1.25) < 1e-8);
    CHECK(std::abs(result.records[2].bounds->delta - 2.0) < 1e-5);
    for (const auto &r : result.records) {
        CHECK(r.provenance.config_hash == result.config_hash);
        CHECK(r.provenance.version == software_version());
        CHECK(r.provenance.n_points == 4096);
        CHECK(r.provenance.x_min == -10.0);
    }
}

TEST_CASE("a failing state is isolated") {
    const auto result = run_corpus(parse_config(R"({
      "states": [
        {"id": "ok", "family": "gaussian"},
        {"id": "too_wide", "family": "gaussian", "sigma": 5},
        {"id": "ho", "family": "ho_eigenstate", "n": 1}
      ],
      "grid": {"x_min": -10, "x_max": 10, "n_points": 2048}
    })"));
    REQUIRE(result.records.size() == 3);
    CHECK_FALSE(result.records[0].errored());
    CHECK(result.records[1].errored());
    CHECK(result.records[1].errors.front().kind == ErrorKind::grid_too_small);
    CHECK_FALSE(result.records[1].bounds);
    CHECK_FALSE(result.records[2].errored());
    CHECK(result.summary.n_errored == 1);
    CHECK(result.summary.n_chain_ok == 2);
    CHECK(result.summary.exit_code == exit_numerical);
}

TEST_CASE("summary counts match the records") {
    auto cfg = parse_config(R"({
      "states": [{"family": "two_gaussian_superposition", "a": 3}, {"family": "box_eigenstate", "n": 2}],
      "random_states": {"count": 5, "seed": 9},
      "grid": {"x_min": -20, "x_max": 20, "n_points": 4096}
    })");
    const auto result = run_corpus(cfg);
    REQUIRE(result.records.size() == 7);
    std::size_t ok = 0;
    for (const auto &r : result.records) {
        if (r.bounds && r.bounds->chain_ok) ++ok;
    }
    CHECK(result.summary.n_chain_ok == ok);
    const auto again = summarize(result.records, cfg.tolerances.tol_identity);
    CHECK(again.n_chain_ok == result.summary.n_chain_ok);
    CHECK(again.max_residual_var_identity == result.summary.max_residual_var_identity);
    CHECK(result.records[1].id == "box_eigenstate_1");
    CHECK(result.records[2].state["family"] == "random_band_limited");
}

TEST_CASE("JSON round trip is exact") {
    RunOptions opts;
    opts.dynamics = true;
    auto cfg = parse_config(R"({
      "states": [{"family": "chirped_gaussian", "alpha": 0.3}, {"family": "cubic_phase_gaussian", "beta": 0.2}],
      "grid": {"x_min": -15, "x_max": 15, "n_points": 1024},
      "dynamics": {"potential": {"kind": "harmonic", "omega": 1}, "dt": 0.002, "t_final": 0.2, "snapshot_stride": 20}
    })");
    const auto result = run_corpus(cfg, opts);
    const std::string text = to_json(result).dump(2);
    const auto back = corpus_from_json(nlohmann::ordered_json::parse(text));
    CHECK(to_json(back).dump(2) == text);
    REQUIRE(back.records.size() == result.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        const auto &a = *result.records[i].stats;
        const auto &b = *back.records[i].stats;
        CHECK(a.var_x == b.var_x);
        CHECK(a.var_p_spectral == b.var_p_spectral);
        CHECK(a.var_p_bohm == b.var_p_bohm);
        CHECK(a.cov_x_pq == b.cov_x_pq);
        CHECK(a.fisher_I == b.fisher_I);
        CHECK(result.records[i].bounds->delta == back.records[i].bounds->delta);
        if (!result.records[i].dynamics) {
            // The cubic phase spreads fast momentum tails to the edge of this grid.
            CHECK(back.records[i].errors.front().kind == ErrorKind::boundary_leakage);
            CHECK(back.records[i].errors.front().stage == "dynamics");
            continue;
        }
        REQUIRE(back.records[i].dynamics);
        CHECK(back.records[i].dynamics->series.size() == result.records[i].dynamics->series.size());
        CHECK(back.records[i].dynamics->series.back().report.product ==
              result.records[i].dynamics->series.back().report.product);
    }
    for (const double v : {0.1, 1.0 / 3.0, 2.5e-300, -7.0e22, 0.30000000000000004}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("CSV output is deterministic with a fixed column order") {
    const auto cfg = parse_config(R"({
      "states": [{"family": "gaussian"}],
      "random_states": {"count": 3, "seed": 4},
      "grid": {"x_min": -20, "x_max": 20, "n_points": 2048}
    })");
    const auto a = scratch("csv_a");
    const auto b = scratch("csv_b");
    emit_plot_data(run_corpus(cfg), PlotKind::bounds_vs_param, a);
    emit_plot_data(run_corpus(cfg), PlotKind::bounds_vs_param, b);
    const auto text = slurp(a / "bounds.csv");
    CHECK(text == slurp(b / "bounds.csv"));
    CHECK(text.rfind("state_id,var_x,var_p_spectral,var_p_bohm,var_pq,cov_x_pq,fisher_I,mean_Q,bound_heisenberg,"
                     "bound_rs,bound_cr,product,delta,residual_var_identity,residual_cov_identity,masked_fraction,"
                     "chain_ok\n",
                     0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    const auto rows = read_csv(a / "bounds.csv");
    CHECK(rows.size() == 5);
    for (const auto &r : rows) CHECK(r.size() == 17);
}

TEST_CASE("fields output for a Gaussian") {
    RunOptions opts;
    opts.keep_fields = true;
    const auto result = run_corpus(parse_config(R"({
      "states": [{"id": "g", "family": "gaussian"}],
      "grid": {"x_min": -10, "x_max": 10, "n_points": 4096}
    })"),
                                   opts);
    const auto dir = scratch("fields");
    const auto files = emit_plot_data(result, PlotKind::fields, dir);
    REQUIRE(files.size() == 1);
    CHECK(files.front().filename() == "fields_g.csv");
    const auto rows = read_csv(files.front());
    REQUIRE(rows.size() == 4097);
    const auto &h = rows.front();
    CHECK(h == std::vector<std::string>{"x", "rho", "p_q", "osmotic", "Q"});
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][0]);
        if (rows[i][4].empty()) continue;
        worst = std::max(worst, std::abs(std::stod(rows[i][4]) - (0.25 - x * x / 8.0)));
    }
    CHECK(worst < 1e-7);

    CHECK_THROWS_AS(emit_plot_data(run_corpus(parse_config(golden_config)), PlotKind::fields, dir), Error);
}

TEST_CASE("sigma sweep keeps the Gaussian product saturated") {
    const auto cfg = expand_sweep(parse_config(R"({"states": [{"id": "g", "family": "gaussian"}]})"), "sigma",
                                  {0.5, 1.0, 2.0});
    REQUIRE(cfg.states.size() == 3);
    CHECK(cfg.states[0].id == "g@sigma=0.5");
    const auto dir = scratch("sweep");
    emit_plot_data(run_corpus(cfg), PlotKind::bounds_vs_param, dir);
    const auto rows = read_csv(dir / "bounds.csv");
    REQUIRE(rows.size() == 4);
    const auto prod = column(rows[0], "product");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][prod]) - 0.25) < 1e-8);
        CHECK(rows[i].back() == "true");
    }
    CHECK_THROWS_AS(expand_sweep(cfg, "omega", {1.0}), Error);
}

TEST_CASE("time series needs a dynamics run") {
    const auto dir = scratch("series");
    try {
        emit_plot_data(run_corpus(parse_config(golden_config)), PlotKind::time_series, dir);
        FAIL("no error");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::missing_data);
    }

    RunOptions opts;
    opts.dynamics = true;
    const auto result = run_corpus(parse_config(R"({
      "states": [{"id": "g", "family": "gaussian"}],
      "grid": {"x_min": -20, "x_max": 20, "n_points": 1024},
      "dynamics": {"potential": {"kind": "free"}, "t_final": 0.5, "snapshot_stride": 100}
    })"),
                                   opts);
    emit_plot_data(result, PlotKind::time_series, dir);
    const auto rows = read_csv(dir / "time_series.csv");
    REQUIRE(rows.size() == 7); // t = 0, 0.1, ..., 0.5
    CHECK(rows[0][0] == "state_id");
    CHECK(rows[0][1] == "t");
    CHECK(rows.back()[1] == "0.5");
    const auto var_x = column(rows[0], "var_x");
    CHECK(std::abs(std::stod(rows.back()[var_x]) - 1.0625) < 1e-6);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    const auto log = dir / "log.txt";

    const auto golden = write_config(dir, "golden", golden_config);
    CHECK(run_cli("verify --config \"" + golden.string() + "\" --out \"" + (dir / "out").string() + "\"", log) == 0);
    CHECK(fs::exists(dir / "out" / "result.json"));
    CHECK(fs::exists(dir / "out" / "bounds.csv"));
    const auto parsed = corpus_from_json(nlohmann::ordered_json::parse(slurp(dir / "out" / "result.json")));
    CHECK(parsed.records.size() == 3);

    CHECK(run_cli("evolve --config \"" + golden.string() + "\" --out \"" + (dir / "evo").string() + "\"", log) == 2);

    const auto strict = write_config(dir, "strict", R"({
      "states": [{"family": "cubic_phase_gaussian", "beta": 0.3333333333333333}],
      "grid": {"x_min": -10, "x_max": 10, "n_points": 1024},
      "tolerances": {"tol_identity": 1e-14}
    })");
    CHECK(run_cli("verify --config \"" + strict.string() + "\" --out \"" + (dir / "strict").string() + "\"", log) ==
          1);

    const auto broken = write_config(dir, "broken", "{\"states\": [");
    CHECK(run_cli("verify --config \"" + broken.string() + "\"", log) == 2);
    CHECK(slurp(log).find("line 1") != std::string::npos);

    const auto wide = write_config(dir, "wide", R"({
      "states": [{"family": "gaussian", "sigma": 5}],
      "grid": {"x_min": -10, "x_max": 10, "n_points": 1024}
    })");
    CHECK(run_cli("verify --config \"" + wide.string() + "\" --out \"" + (dir / "wide").string() + "\"", log) == 3);

    const auto moving = write_config(dir, "moving", R"({
      "states": [{"id": "m", "family": "gaussian", "p0": 1}],
      "grid": {"x_min": -20, "x_max": 20, "n_points": 4096},
      "dynamics": {"potential": {"kind": "harmonic"}, "dt": 0.001, "t_final": 0.5, "snapshot_stride": 50},
      "output": {"plots": ["bounds_vs_param", "time_series", "fields"]}
    })");
    CHECK(run_cli("evolve --config \"" + moving.string() + "\" --out \"" + (dir / "evolve").string() + "\"", log) ==
          0);
    CHECK(fs::exists(dir / "evolve" / "time_series.csv"));
    CHECK(fs::exists(dir / "evolve" / "fields_m.csv"));

    CHECK(run_cli("sweep --config \"" + golden.string() + "\" --param sigma --values 0.5,0.8 --out \"" +
                      (dir / "sweep").string() + "\"",
                  log) == 0);
    CHECK(read_csv(dir / "sweep" / "bounds.csv").size() == 7);

    CHECK(run_cli("verify", log) == 2);
}
