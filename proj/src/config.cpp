#include "qpfisher/config.hpp"

#include "qpfisher/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qpf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    raise(ErrorKind::config_parse, path + ": " + msg);
}

void check_keys(const json &obj, const std::string &path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto &[key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(path + "." + key, "unknown key");
        }
    }
}

double number(const json &obj, const std::string &key, const std::string &path) {
    const auto &v = obj.at(key);
    if (!v.is_number()) {
        fail(path + "." + key, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        fail(path + "." + key, "must be finite");
    }
    return d;
}

double positive(const json &obj, const std::string &key, const std::string &path) {
    const double d = number(obj, key, path);
    if (!(d > 0.0)) {
        fail(path + "." + key, "must be positive");
    }
    return d;
}

std::uint64_t unsigned_integer(const json &obj, const std::string &key, const std::string &path) {
    const auto &v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        fail(path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

GridSpec parse_grid(const json &g) {
    check_keys(g, "grid", {"x_min", "x_max", "n_points"});
    GridSpec spec;
    if (g.contains("n_points")) {
        spec.n_points = unsigned_integer(g, "n_points", "grid");
    }
    if (g.contains("x_min") != g.contains("x_max")) {
        fail("grid", "x_min and x_max must be given together");
    }
    if (g.contains("x_min")) {
        spec.x_min = number(g, "x_min", "grid");
        spec.x_max = number(g, "x_max", "grid");
    }
    try {
        if (spec.x_min) {
            make_grid(*spec.x_min, *spec.x_max, spec.n_points);
        } else if (spec.n_points < min_grid_points) {
            raise(ErrorKind::too_coarse, "n_points must be at least " + std::to_string(min_grid_points));
        }
    } catch (const Error &e) {
        fail("grid", e.what());
    }
    return spec;
}

Potential parse_potential(const json &p) {
    const std::string path = "dynamics.potential";
    if (!p.is_object() || !p.contains("kind") || !p.at("kind").is_string()) {
        fail(path, "expected an object with a string 'kind'");
    }
    const auto kind = p.at("kind").get<std::string>();
    if (kind == "free") {
        check_keys(p, path, {"kind"});
        return Potential::free_particle();
    }
    if (kind == "harmonic") {
        check_keys(p, path, {"kind", "omega"});
        return Potential::harmonic(p.contains("omega") ? positive(p, "omega", path) : 1.0);
    }
    if (kind == "double_well") {
        check_keys(p, path, {"kind", "barrier_height", "separation"});
        return Potential::double_well(number(p, "barrier_height", path), positive(p, "separation", path));
    }
    if (kind == "sampled") {
        check_keys(p, path, {"kind", "values"});
        const auto &v = p.at("values");
        if (!v.is_array()) {
            fail(path + ".values", "expected an array of numbers");
        }
        std::vector<double> values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                fail(path + ".values[" + std::to_string(i) + "]", "expected a number");
            }
            values.push_back(v[i].get<double>());
        }
        return Potential::sampled(std::move(values));
    }
    fail(path + ".kind", "unknown potential '" + kind + "'");
}

EvolutionConfig parse_dynamics(const json &d) {
    check_keys(d, "dynamics", {"potential", "dt", "t_final", "snapshot_stride"});
    EvolutionConfig c;
    if (!d.contains("potential") || !d.contains("t_final")) {
        fail("dynamics", "needs 'potential' and 't_final'");
    }
    c.potential = parse_potential(d.at("potential"));
    c.t_final = positive(d, "t_final", "dynamics");
    if (d.contains("dt")) {
        c.dt = positive(d, "dt", "dynamics");
    }
    if (d.contains("snapshot_stride")) {
        c.snapshot_stride = unsigned_integer(d, "snapshot_stride", "dynamics");
    }
    try {
        c.validate();
    } catch (const Error &e) {
        fail("dynamics", e.what());
    }
    return c;
}

OutputSpec parse_output(const json &o) {
    check_keys(o, "output", {"directory", "formats", "plots"});
    OutputSpec out;
    if (o.contains("directory")) {
        if (!o.at("directory").is_string()) {
            fail("output.directory", "expected a string");
        }
        out.directory = o.at("directory").get<std::string>();
    }
    if (o.contains("formats")) {
        const auto &f = o.at("formats");
        if (!f.is_array() || f.empty()) {
            fail("output.formats", "expected a non-empty array");
        }
        out.json = out.csv = false;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::string where = "output.formats[" + std::to_string(i) + "]";
            if (f[i] == "json") {
                out.json = true;
            } else if (f[i] == "csv") {
                out.csv = true;
            } else {
                fail(where, "expected \"json\" or \"csv\"");
            }
        }
    }
    if (o.contains("plots")) {
        const auto &p = o.at("plots");
        if (!p.is_array()) {
            fail("output.plots", "expected an array");
        }
        out.plots.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string where = "output.plots[" + std::to_string(i) + "]";
            if (p[i] == "fields") {
                out.plots.push_back(PlotKind::fields);
            } else if (p[i] == "bounds_vs_param") {
                out.plots.push_back(PlotKind::bounds_vs_param);
            } else if (p[i] == "time_series") {
                out.plots.push_back(PlotKind::time_series);
            } else {
                fail(where, "unknown plot kind");
            }
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

std::string_view to_string(PlotKind kind) noexcept {
    switch (kind) {
    case PlotKind::fields: return "fields";
    case PlotKind::bounds_vs_param: return "bounds_vs_param";
    case PlotKind::time_series: return "time_series";
    }
    return "unknown";
}

Grid1D GridSpec::for_state(const AnalyticState &state, const Physics &physics) const {
    if (x_min && x_max) {
        return Grid1D(*x_min, *x_max, n_points);
    }
    return suggested_grid(state, physics, n_points);
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        raise(ErrorKind::config_parse,
              "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
    check_keys(doc, "config",
               {"states", "random_states", "grid", "physics", "tolerances", "scheme", "dynamics", "trajectories",
                "output"});

    RunConfig cfg;
    try {
        if (doc.contains("states")) {
            const auto &states = doc.at("states");
            if (!states.is_array()) {
                fail("states", "expected an array");
            }
            for (std::size_t i = 0; i < states.size(); ++i) {
                cfg.states.push_back(parse_state(states[i], "states[" + std::to_string(i) + "]"));
            }
        }
        if (doc.contains("random_states")) {
            const auto &r = doc.at("random_states");
            check_keys(r, "random_states", {"count", "seed"});
            cfg.random.count = unsigned_integer(r, "count", "random_states");
            if (r.contains("seed")) {
                cfg.random.seed = unsigned_integer(r, "seed", "random_states");
            }
        }
        if (cfg.state_count() == 0) {
            fail("states", "at least one state is required");
        }
        if (doc.contains("grid")) {
            cfg.grid = parse_grid(doc.at("grid"));
        }
        if (cfg.random.count > 0 && !cfg.grid.x_min) {
            fail("grid", "random states need an explicit x_min and x_max");
        }
        if (doc.contains("physics")) {
            const auto &p = doc.at("physics");
            check_keys(p, "physics", {"hbar", "mass"});
            if (p.contains("hbar")) cfg.physics.hbar = positive(p, "hbar", "physics");
            if (p.contains("mass")) cfg.physics.mass = positive(p, "mass", "physics");
        }
        if (doc.contains("tolerances")) {
            const auto &t = doc.at("tolerances");
            check_keys(t, "tolerances", {"tol_norm", "tol_identity", "eps_node", "boundary_eps"});
            if (t.contains("tol_norm")) cfg.tolerances.tol_norm = positive(t, "tol_norm", "tolerances");
            if (t.contains("tol_identity")) cfg.tolerances.tol_identity = positive(t, "tol_identity", "tolerances");
            if (t.contains("eps_node")) cfg.tolerances.eps_node = positive(t, "eps_node", "tolerances");
            if (t.contains("boundary_eps")) cfg.tolerances.boundary_eps = positive(t, "boundary_eps", "tolerances");
        }
        if (doc.contains("scheme")) {
            const auto &s = doc.at("scheme");
            if (s == "central4") {
                cfg.scheme = DiffScheme::central4;
            } else if (s == "spectral") {
                cfg.scheme = DiffScheme::spectral;
            } else {
                fail("scheme", "expected \"central4\" or \"spectral\"");
            }
        }
        if (doc.contains("dynamics")) {
            cfg.dynamics = parse_dynamics(doc.at("dynamics"));
        }
        if (doc.contains("trajectories")) {
            const auto &t = doc.at("trajectories");
            check_keys(t, "trajectories", {"n_particles", "seed"});
            TrajectorySpec spec;
            if (t.contains("n_particles")) spec.n_particles = unsigned_integer(t, "n_particles", "trajectories");
            if (t.contains("seed")) spec.seed = unsigned_integer(t, "seed", "trajectories");
            cfg.trajectories = spec;
        }
        if (doc.contains("output")) {
            cfg.output = parse_output(doc.at("output"));
        }
    } catch (const json::exception &e) {
        // Missing keys and type errors that slipped past the checks above.
        raise(ErrorKind::config_parse, std::string("invalid config: ") + e.what());
    }
    cfg.canonical = doc.dump();
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorKind::config_parse, "cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

} // namespace qpf
