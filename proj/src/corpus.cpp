#include "qpfisher/corpus.hpp"

#include "qpfisher/states.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#ifndef QPFISHER_VERSION
#define QPFISHER_VERSION "0.0.0"
#endif

namespace qpf {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr ErrorKind all_kinds[] = {
    ErrorKind::invalid_extent, ErrorKind::too_coarse,       ErrorKind::grid_too_small,
    ErrorKind::grid_misaligned, ErrorKind::length_mismatch, ErrorKind::boundary_leakage,
    ErrorKind::all_masked,      ErrorKind::node_dominated,  ErrorKind::invalid_state,
    ErrorKind::not_normalized,  ErrorKind::precondition,    ErrorKind::asymmetric_density,
    ErrorKind::unstable_step,   ErrorKind::node_encounter,  ErrorKind::too_few_trajectories,
    ErrorKind::config_parse,    ErrorKind::missing_data,    ErrorKind::io,
};

ErrorKind parse_kind(const std::string &name) {
    for (ErrorKind k : all_kinds) {
        if (to_string(k) == name) {
            return k;
        }
    }
    raise(ErrorKind::config_parse, "unknown error kind '" + name + "'");
}

// NaN is written as null.
double num(const ordered_json &j, const char *key) {
    const auto &v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

// One unit of work: how to build the state and how to describe it.
struct Job {
    std::string id;
    ordered_json state;
    std::optional<AnalyticState> analytic;
    std::uint64_t random_index = 0;
};

ordered_json stats_json(const MomentStats &s) {
    ordered_json j;
    j["mean_x"] = s.mean_x;
    j["var_x"] = s.var_x;
    j["mean_p_op"] = s.mean_p_op;
    j["var_p_spectral"] = s.var_p_spectral;
    j["var_p_bohm"] = s.var_p_bohm;
    j["mean_pq"] = s.mean_pq;
    j["var_pq"] = s.var_pq;
    j["cov_x_pq"] = s.cov_x_pq;
    j["cov_op"] = s.cov_op;
    j["cov_op_imag"] = s.cov_op_imag;
    j["fisher_I"] = s.fisher_I;
    j["mean_Q"] = s.mean_Q;
    j["residual_q_identity"] = s.residual_q_identity;
    j["masked_fraction"] = s.masked_fraction;
    j["momentum_route"] = std::string(to_string(s.route));
    return j;
}

MomentStats stats_from(const ordered_json &j) {
    MomentStats s;
    s.mean_x = num(j, "mean_x");
    s.var_x = num(j, "var_x");
    s.mean_p_op = num(j, "mean_p_op");
    s.var_p_spectral = num(j, "var_p_spectral");
    s.var_p_bohm = num(j, "var_p_bohm");
    s.mean_pq = num(j, "mean_pq");
    s.var_pq = num(j, "var_pq");
    s.cov_x_pq = num(j, "cov_x_pq");
    s.cov_op = num(j, "cov_op");
    s.cov_op_imag = num(j, "cov_op_imag");
    s.fisher_I = num(j, "fisher_I");
    s.mean_Q = num(j, "mean_Q");
    s.residual_q_identity = num(j, "residual_q_identity");
    s.masked_fraction = num(j, "masked_fraction");
    s.route = j.at("momentum_route") == "position_operator" ? MomentumRoute::position_operator
                                                            : MomentumRoute::momentum_space;
    return s;
}

ordered_json bounds_json(const BoundsReport &b) {
    ordered_json j;
    j["product"] = b.product;
    j["bound_heisenberg"] = b.bound_heisenberg;
    j["bound_rs"] = b.bound_rs;
    j["bound_cr"] = b.bound_cr;
    j["delta"] = b.delta;
    j["chain_ok"] = b.chain_ok;
    j["identity_ok"] = b.identity_ok;
    j["gap_ok"] = b.gap_ok;
    j["residual_var_identity"] = b.residual_var_identity;
    j["residual_cov_identity"] = b.residual_cov_identity;
    j["residual_mean_identity"] = b.residual_mean_identity;
    j["residual_q_identity"] = b.residual_q_identity;
    j["masked_fraction"] = b.masked_fraction;
    return j;
}

BoundsReport bounds_from(const ordered_json &j) {
    BoundsReport b;
    b.product = num(j, "product");
    b.bound_heisenberg = num(j, "bound_heisenberg");
    b.bound_rs = num(j, "bound_rs");
    b.bound_cr = num(j, "bound_cr");
    b.delta = num(j, "delta");
    b.chain_ok = j.at("chain_ok").get<bool>();
    b.identity_ok = j.at("identity_ok").get<bool>();
    b.gap_ok = j.at("gap_ok").get<bool>();
    b.residual_var_identity = num(j, "residual_var_identity");
    b.residual_cov_identity = num(j, "residual_cov_identity");
    b.residual_mean_identity = num(j, "residual_mean_identity");
    b.residual_q_identity = num(j, "residual_q_identity");
    b.masked_fraction = num(j, "masked_fraction");
    return b;
}

ordered_json provenance_json(const Provenance &p) {
    ordered_json j;
    j["config_hash"] = p.config_hash;
    j["version"] = p.version;
    j["grid"] = {{"x_min", p.x_min}, {"x_max", p.x_max}, {"n_points", p.n_points}};
    j["physics"] = {{"hbar", p.physics.hbar}, {"mass", p.physics.mass}};
    j["tolerances"] = {{"tol_norm", p.tolerances.tol_norm},
                       {"tol_identity", p.tolerances.tol_identity},
                       {"eps_node", p.tolerances.eps_node},
                       {"boundary_eps", p.tolerances.boundary_eps}};
    j["scheme"] = p.scheme;
    return j;
}

Provenance provenance_from(const ordered_json &j) {
    Provenance p;
    p.config_hash = j.at("config_hash").get<std::string>();
    p.version = j.at("version").get<std::string>();
    const auto &g = j.at("grid");
    p.x_min = num(g, "x_min");
    p.x_max = num(g, "x_max");
    p.n_points = g.at("n_points").get<std::size_t>();
    p.physics.hbar = num(j.at("physics"), "hbar");
    p.physics.mass = num(j.at("physics"), "mass");
    const auto &t = j.at("tolerances");
    p.tolerances.tol_norm = num(t, "tol_norm");
    p.tolerances.tol_identity = num(t, "tol_identity");
    p.tolerances.eps_node = num(t, "eps_node");
    p.tolerances.boundary_eps = num(t, "boundary_eps");
    p.scheme = j.at("scheme").get<std::string>();
    return p;
}

ordered_json dynamics_json(const DynamicsRecord &d) {
    ordered_json j;
    j["potential"] = d.potential;
    j["dt"] = d.dt;
    j["t_final"] = d.t_final;
    j["max_norm_drift"] = d.max_norm_drift;
    j["energy_drift"] = d.energy_drift;
    j["max_continuity_residual"] = d.max_continuity_residual;
    if (d.trajectories) {
        const auto &t = *d.trajectories;
        j["trajectories"] = {{"n_particles", t.n_particles}, {"node_encounters", t.node_encounters},
                             {"order_preserved", t.order_preserved}, {"ks_initial", t.ks_initial},
                             {"ks_final", t.ks_final}, {"ks_max", t.ks_max}};
    }
    ordered_json series = ordered_json::array();
    for (const auto &p : d.series) {
        ordered_json row;
        row["t"] = p.t;
        row["stats"] = stats_json(p.stats);
        row["bounds"] = bounds_json(p.report);
        series.push_back(std::move(row));
    }
    j["series"] = std::move(series);
    return j;
}

DynamicsRecord dynamics_from(const ordered_json &j) {
    DynamicsRecord d;
    d.potential = j.at("potential").get<std::string>();
    d.dt = num(j, "dt");
    d.t_final = num(j, "t_final");
    d.max_norm_drift = num(j, "max_norm_drift");
    d.energy_drift = num(j, "energy_drift");
    d.max_continuity_residual = num(j, "max_continuity_residual");
    if (j.contains("trajectories")) {
        const auto &t = j.at("trajectories");
        TrajectorySummary s;
        s.n_particles = t.at("n_particles").get<std::size_t>();
        s.node_encounters = t.at("node_encounters").get<std::size_t>();
        s.order_preserved = t.at("order_preserved").get<bool>();
        s.ks_initial = num(t, "ks_initial");
        s.ks_final = num(t, "ks_final");
        s.ks_max = num(t, "ks_max");
        d.trajectories = s;
    }
    for (const auto &row : j.at("series")) {
        d.series.push_back({num(row, "t"), stats_from(row.at("stats")), bounds_from(row.at("bounds"))});
    }
    return d;
}

std::string_view scheme_name(DiffScheme s) { return s == DiffScheme::spectral ? "spectral" : "central4"; }

DynamicsRecord run_dynamics(const Wavefunction &psi, const RunConfig &cfg, const MomentOptions &mo,
                            std::uint64_t traj_seed) {
    const Tolerances &tol = cfg.tolerances;
    const Evolution ev = split_step_evolve(psi, *cfg.dynamics, tol.boundary_eps, tol.tol_norm);
    DynamicsRecord d;
    d.potential = cfg.dynamics->potential.name();
    d.dt = ev.dt;
    d.t_final = cfg.dynamics->t_final;
    d.series = bounds_over_time(ev, mo, tol.tol_identity);
    const double e0 = energy(ev.snapshots.front(), ev.potential);
    for (const auto &snap : ev.snapshots) {
        d.max_norm_drift = std::max(d.max_norm_drift, std::abs(snap.norm() - 1.0));
        d.energy_drift = std::max(d.energy_drift, std::abs(energy(snap, ev.potential) - e0) /
                                                      std::max(std::abs(e0), std::numeric_limits<double>::min()));
    }
    d.max_continuity_residual = max_continuity_residual(ev);
    if (cfg.trajectories) {
        const Grid1D &grid = psi.grid();
        const auto x0 = sample_initial_positions(psi.density(), grid, cfg.trajectories->n_particles, traj_seed);
        const auto ens = integrate_trajectories(ev, x0, ev.dt, mo.bohmian);
        TrajectorySummary t;
        t.n_particles = x0.size();
        t.node_encounters = ens.node_encounters;
        t.order_preserved = ens.order_preserved();
        for (std::size_t s = 0; s < ev.snapshots.size(); ++s) {
            const double ks = equivariance_distance(ens, s, ev.snapshots[s].density(), grid);
            if (s == 0) t.ks_initial = ks;
            t.ks_max = std::max(t.ks_max, ks);
            t.ks_final = ks;
        }
        d.trajectories = t;
    }
    return d;
}

StateRecord run_job(const Job &job, std::size_t index, const RunConfig &cfg, const RunOptions &opts,
                    const std::string &hash, std::uint64_t random_seed, std::uint64_t traj_seed) {
    StateRecord rec;
    rec.id = job.id;
    rec.state = job.state;
    rec.provenance.config_hash = hash;
    rec.provenance.version = std::string(software_version());
    rec.provenance.physics = cfg.physics;
    rec.provenance.tolerances = cfg.tolerances;
    rec.provenance.n_points = cfg.grid.n_points;
    if (cfg.grid.x_min) {
        rec.provenance.x_min = *cfg.grid.x_min;
        rec.provenance.x_max = *cfg.grid.x_max;
    }
    rec.provenance.scheme = std::string(scheme_name(cfg.scheme));

    std::optional<Wavefunction> psi;
    MomentOptions mo;
    mo.boundary_eps = cfg.tolerances.boundary_eps;
    mo.bohmian.eps_node = cfg.tolerances.eps_node;
    try {
        if (job.analytic) {
            const Grid1D grid = cfg.grid.for_state(*job.analytic, cfg.physics);
            rec.provenance.x_min = grid.x_min();
            rec.provenance.x_max = grid.x_max();
            psi.emplace(sample_analytic(*job.analytic, grid, cfg.physics, cfg.tolerances));
        } else {
            const Grid1D grid(*cfg.grid.x_min, *cfg.grid.x_max, cfg.grid.n_points);
            psi.emplace(random_band_limited(grid, cfg.physics, random_seed, job.random_index));
        }
        // Hard-wall states fall back to stencils whatever the configured scheme.
        mo.bohmian.scheme = psi->spectral_ok() ? cfg.scheme : DiffScheme::central4;
        rec.provenance.scheme = std::string(scheme_name(mo.bohmian.scheme));
        rec.stats = moment_stats(*psi, mo);
        rec.bounds = bounds_report(*rec.stats, cfg.physics.hbar, cfg.tolerances.tol_identity);
        if (opts.keep_fields) {
            rec.fields = FieldSamples{psi->grid().coordinates(), polar_fields(*psi, mo.bohmian)};
        }
    } catch (const Error &e) {
        rec.errors.push_back({"static", e.kind(), e.what()});
        return rec;
    }
    if (opts.dynamics && cfg.dynamics) {
        try {
            rec.dynamics = run_dynamics(*psi, cfg, mo, traj_seed + index);
        } catch (const Error &e) {
            rec.errors.push_back({"dynamics", e.kind(), e.what()});
        }
    }
    return rec;
}

std::string sanitize(const std::string &id) {
    std::string out = id;
    for (char &c : out) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ||
                        c == '=' || c == '@';
        if (!ok) {
            c = '_';
        }
    }
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorKind::io, "cannot write " + path.string());
    }
    out << content;
    if (!out) {
        raise(ErrorKind::io, "write failed for " + path.string());
    }
}

void append_bounds_columns(std::string &row, const MomentStats &s, const BoundsReport &b) {
    for (double v : {s.var_x, s.var_p_spectral, s.var_p_bohm, s.var_pq, s.cov_x_pq, s.fisher_I, s.mean_Q,
                     b.bound_heisenberg, b.bound_rs, b.bound_cr, b.product, b.delta, b.residual_var_identity,
                     b.residual_cov_identity, b.masked_fraction}) {
        row += ',';
        row += format_double(v);
    }
    row += b.chain_ok ? ",true" : ",false";
}

} // namespace

std::string_view software_version() noexcept { return QPFISHER_VERSION; }

CorpusResult run_corpus(const RunConfig &cfg, const RunOptions &opts) {
    const std::uint64_t random_seed = opts.seed.value_or(cfg.random.seed);
    const std::uint64_t traj_seed = opts.seed.value_or(cfg.trajectories ? cfg.trajectories->seed : 0);
    std::string hashed = cfg.canonical;
    if (opts.seed) {
        hashed += "|seed=" + std::to_string(*opts.seed);
    }
    if (opts.dynamics) {
        hashed += "|dynamics";
    }
    CorpusResult result;
    result.config_hash = fnv1a_hex(hashed);
    result.version = std::string(software_version());

    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cfg.states.size(); ++i) {
        const auto &s = cfg.states[i];
        Job job;
        job.id = s.id.empty() ? std::string(to_string(s.family)) + "_" + std::to_string(i) : s.id;
        job.state = to_json(s);
        job.state["id"] = job.id;
        job.analytic = s;
        jobs.push_back(std::move(job));
    }
    for (std::size_t k = 0; k < cfg.random.count; ++k) {
        Job job;
        job.id = "random_" + std::to_string(k);
        job.state = {{"id", job.id}, {"family", "random_band_limited"}, {"seed", random_seed}, {"index", k}};
        job.random_index = k;
        jobs.push_back(std::move(job));
    }

    result.records.resize(jobs.size());
    const std::size_t workers =
        std::clamp<std::size_t>(std::min<std::size_t>(std::thread::hardware_concurrency(), jobs.size()), 1, 16);
    std::vector<std::future<void>> running;
    for (std::size_t w = 0; w < workers; ++w) {
        running.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < jobs.size(); i += workers) {
                result.records[i] = run_job(jobs[i], i, cfg, opts, result.config_hash, random_seed, traj_seed);
            }
        }));
    }
    for (auto &r : running) {
        r.get();
    }
    result.summary = summarize(result.records, cfg.tolerances.tol_identity);
    return result;
}

RunConfig expand_sweep(const RunConfig &cfg, const std::string &key, const std::vector<double> &values) {
    if (values.empty()) {
        raise(ErrorKind::config_parse, "sweep needs at least one value");
    }
    if (cfg.random.count > 0) {
        raise(ErrorKind::config_parse, "random states have no sweepable parameters");
    }
    RunConfig out = cfg;
    out.states.clear();
    for (std::size_t i = 0; i < cfg.states.size(); ++i) {
        const auto &base = cfg.states[i];
        const std::string id = base.id.empty() ? std::string(to_string(base.family)) + "_" + std::to_string(i) : base.id;
        for (double v : values) {
            AnalyticState s = base;
            set_parameter(s, key, v);
            try {
                s.validate();
            } catch (const Error &e) {
                raise(ErrorKind::config_parse, "sweep " + key + "=" + format_double(v) + ": " + e.what());
            }
            s.id = id + "@" + key + "=" + format_double(v);
            out.states.push_back(std::move(s));
        }
    }
    out.canonical += "|sweep " + key;
    for (double v : values) {
        out.canonical += " " + format_double(v);
    }
    return out;
}

Summary summarize(const std::vector<StateRecord> &records, double tol_identity) {
    Summary s;
    s.n_states = records.size();
    auto account = [&](const BoundsReport &b) {
        s.n_chain_violations += b.chain_ok ? 0 : 1;
        s.n_identity_violations += b.identity_ok ? 0 : 1;
        s.n_gap_violations += b.gap_ok ? 0 : 1;
        if (b.product < b.bound_cr - 10.0 * tol_identity * b.product) {
            ++s.n_forbidden_entries;
        }
        s.max_residual_var_identity = std::max(s.max_residual_var_identity, b.residual_var_identity);
        s.max_residual_cov_identity = std::max(s.max_residual_cov_identity, b.residual_cov_identity);
        s.max_residual_mean_identity = std::max(s.max_residual_mean_identity, b.residual_mean_identity);
        s.max_residual_q_identity = std::max(s.max_residual_q_identity, b.residual_q_identity);
        s.max_masked_fraction = std::max(s.max_masked_fraction, b.masked_fraction);
    };
    for (const auto &r : records) {
        if (r.errored()) {
            ++s.n_errored;
        }
        if (r.bounds) {
            s.n_chain_ok += r.bounds->chain_ok ? 1 : 0;
            account(*r.bounds);
        }
        if (r.dynamics) {
            for (const auto &p : r.dynamics->series) {
                account(p.report);
            }
        }
    }
    if (s.n_chain_violations + s.n_identity_violations + s.n_gap_violations > 0) {
        s.exit_code = exit_violation;
    } else if (s.n_errored > 0) {
        s.exit_code = exit_numerical;
    } else {
        s.exit_code = exit_ok;
    }
    return s;
}

ordered_json to_json(const CorpusResult &result) {
    ordered_json j;
    j["software"] = {{"name", "qpfisher"}, {"version", result.version}};
    j["config_hash"] = result.config_hash;
    ordered_json records = ordered_json::array();
    for (const auto &r : result.records) {
        ordered_json rec;
        rec["id"] = r.id;
        rec["status"] = r.errored() ? "errored" : "ok";
        rec["state"] = r.state;
        rec["provenance"] = provenance_json(r.provenance);
        if (r.stats) rec["stats"] = stats_json(*r.stats);
        if (r.bounds) rec["bounds"] = bounds_json(*r.bounds);
        if (r.dynamics) rec["dynamics"] = dynamics_json(*r.dynamics);
        ordered_json errors = ordered_json::array();
        for (const auto &e : r.errors) {
            errors.push_back({{"stage", e.stage}, {"kind", std::string(to_string(e.kind))}, {"message", e.message}});
        }
        rec["errors"] = std::move(errors);
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    const Summary &s = result.summary;
    j["summary"] = {{"n_states", s.n_states},
                    {"n_chain_ok", s.n_chain_ok},
                    {"n_errored", s.n_errored},
                    {"n_chain_violations", s.n_chain_violations},
                    {"n_identity_violations", s.n_identity_violations},
                    {"n_gap_violations", s.n_gap_violations},
                    {"n_forbidden_entries", s.n_forbidden_entries},
                    {"max_residual_var_identity", s.max_residual_var_identity},
                    {"max_residual_cov_identity", s.max_residual_cov_identity},
                    {"max_residual_mean_identity", s.max_residual_mean_identity},
                    {"max_residual_q_identity", s.max_residual_q_identity},
                    {"max_masked_fraction", s.max_masked_fraction},
                    {"exit_code", s.exit_code}};
    return j;
}

CorpusResult corpus_from_json(const ordered_json &j) {
    try {
        CorpusResult result;
        result.version = j.at("software").at("version").get<std::string>();
        result.config_hash = j.at("config_hash").get<std::string>();
        for (const auto &rec : j.at("records")) {
            StateRecord r;
            r.id = rec.at("id").get<std::string>();
            r.state = rec.at("state");
            r.provenance = provenance_from(rec.at("provenance"));
            if (rec.contains("stats")) r.stats = stats_from(rec.at("stats"));
            if (rec.contains("bounds")) r.bounds = bounds_from(rec.at("bounds"));
            if (rec.contains("dynamics")) r.dynamics = dynamics_from(rec.at("dynamics"));
            for (const auto &e : rec.at("errors")) {
                r.errors.push_back({e.at("stage").get<std::string>(), parse_kind(e.at("kind").get<std::string>()),
                                    e.at("message").get<std::string>()});
            }
            result.records.push_back(std::move(r));
        }
        const auto &s = j.at("summary");
        Summary &m = result.summary;
        m.n_states = s.at("n_states").get<std::size_t>();
        m.n_chain_ok = s.at("n_chain_ok").get<std::size_t>();
        m.n_errored = s.at("n_errored").get<std::size_t>();
        m.n_chain_violations = s.at("n_chain_violations").get<std::size_t>();
        m.n_identity_violations = s.at("n_identity_violations").get<std::size_t>();
        m.n_gap_violations = s.at("n_gap_violations").get<std::size_t>();
        m.n_forbidden_entries = s.at("n_forbidden_entries").get<std::size_t>();
        m.max_residual_var_identity = num(s, "max_residual_var_identity");
        m.max_residual_cov_identity = num(s, "max_residual_cov_identity");
        m.max_residual_mean_identity = num(s, "max_residual_mean_identity");
        m.max_residual_q_identity = num(s, "max_residual_q_identity");
        m.max_masked_fraction = num(s, "max_masked_fraction");
        m.exit_code = s.at("exit_code").get<int>();
        return result;
    } catch (const json::exception &e) {
        raise(ErrorKind::config_parse, std::string("malformed result document: ") + e.what());
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::filesystem::path> emit_plot_data(const CorpusResult &result, PlotKind kind,
                                                  const std::filesystem::path &directory) {
    std::vector<std::filesystem::path> written;
    switch (kind) {
    case PlotKind::fields: {
        for (const auto &r : result.records) {
            if (!r.fields) {
                continue;
            }
            const auto &f = r.fields->fields;
            std::string csv = "x,rho,p_q,osmotic,Q\n";
            for (std::size_t i = 0; i < r.fields->x.size(); ++i) {
                csv += format_double(r.fields->x[i]);
                csv += ',';
                csv += format_double(f.rho[i]);
                // Masked nodes have no field values; leave the cells empty.
                for (const auto *col : {&f.p_q, &f.osmotic, &f.Q}) {
                    csv += ',';
                    if (!f.node_mask[i]) {
                        csv += format_double((*col)[i]);
                    }
                }
                csv += '\n';
            }
            const auto path = directory / ("fields_" + sanitize(r.id) + ".csv");
            write_file(path, csv);
            written.push_back(path);
        }
        if (written.empty()) {
            raise(ErrorKind::missing_data, "no field samples in the result");
        }
        break;
    }
    case PlotKind::bounds_vs_param: {
        std::string csv = std::string(bounds_csv_header) + "\n";
        bool any = false;
        for (const auto &r : result.records) {
            if (!r.stats || !r.bounds) {
                continue;
            }
            any = true;
            std::string row = r.id;
            append_bounds_columns(row, *r.stats, *r.bounds);
            csv += row + "\n";
        }
        if (!any) {
            raise(ErrorKind::missing_data, "no state produced bounds");
        }
        const auto path = directory / "bounds.csv";
        write_file(path, csv);
        written.push_back(path);
        break;
    }
    case PlotKind::time_series: {
        std::string header = bounds_csv_header;
        header.insert(header.find(',') + 1, "t,");
        std::string csv = header + "\n";
        bool any = false;
        for (const auto &r : result.records) {
            if (!r.dynamics) {
                continue;
            }
            any = true;
            for (const auto &p : r.dynamics->series) {
                std::string row = r.id + "," + format_double(p.t);
                append_bounds_columns(row, p.stats, p.report);
                csv += row + "\n";
            }
        }
        if (!any) {
            raise(ErrorKind::missing_data, "time series requested but no dynamics were run");
        }
        const auto path = directory / "time_series.csv";
        write_file(path, csv);
        written.push_back(path);
        break;
    }
    }
    return written;
}

std::vector<std::filesystem::path> write_outputs(const CorpusResult &result, const OutputSpec &output,
                                                 const std::filesystem::path &directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        raise(ErrorKind::io, "cannot create " + directory.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    if (output.json) {
        const auto path = directory / "result.json";
        write_file(path, to_json(result).dump(2) + "\n");
        written.push_back(path);
    }
    if (output.csv) {
        const bool has_fields = std::any_of(result.records.begin(), result.records.end(),
                                            [](const StateRecord &r) { return r.fields.has_value(); });
        const bool has_dynamics = std::any_of(result.records.begin(), result.records.end(),
                                              [](const StateRecord &r) { return r.dynamics.has_value(); });
        const bool has_bounds = std::any_of(result.records.begin(), result.records.end(),
                                            [](const StateRecord &r) { return r.bounds.has_value(); });
        for (PlotKind kind : output.plots) {
            // Kinds without data in this run are skipped here; emit_plot_data
            // itself reports them as missing.
            if ((kind == PlotKind::fields && !has_fields) || (kind == PlotKind::time_series && !has_dynamics) ||
                (kind == PlotKind::bounds_vs_param && !has_bounds)) {
                continue;
            }
            const auto files = emit_plot_data(result, kind, directory);
            written.insert(written.end(), files.begin(), files.end());
        }
    }
    return written;
}

} // namespace qpf
