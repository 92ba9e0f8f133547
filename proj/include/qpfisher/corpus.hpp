#pragma once

#include "qpfisher/bounds.hpp"
#include "qpfisher/config.hpp"
#include "qpfisher/dynamics.hpp"
#include "qpfisher/error.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qpf {

std::string_view software_version() noexcept;

struct Provenance {
    std::string config_hash;
    std::string version;
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_points = 0;
    Physics physics;
    Tolerances tolerances;
    std::string scheme;
};

struct StageError {
    std::string stage; // "static" or "dynamics"
    ErrorKind kind = ErrorKind::precondition;
    std::string message;
};

struct TrajectorySummary {
    std::size_t n_particles = 0;
    std::size_t node_encounters = 0;
    bool order_preserved = false;
    double ks_initial = 0.0;
    double ks_final = 0.0;
    double ks_max = 0.0;
};

struct DynamicsRecord {
    std::string potential;
    double dt = 0.0;
    double t_final = 0.0;
    double max_norm_drift = 0.0;
    double energy_drift = 0.0; // relative
    double max_continuity_residual = 0.0;
    std::vector<TimePoint> series;
    std::optional<TrajectorySummary> trajectories;
};

// Bohmian fields kept in memory for plot output; never serialized.
struct FieldSamples {
    std::vector<double> x;
    PolarFields fields;
};

struct StateRecord {
    std::string id;
    nlohmann::ordered_json state;
    Provenance provenance;
    std::optional<MomentStats> stats;
    std::optional<BoundsReport> bounds;
    std::optional<DynamicsRecord> dynamics;
    std::optional<FieldSamples> fields;
    std::vector<StageError> errors;

    bool errored() const noexcept { return !errors.empty(); }
};

struct Summary {
    std::size_t n_states = 0;
    std::size_t n_chain_ok = 0;
    std::size_t n_errored = 0;
    std::size_t n_chain_violations = 0;    // records or snapshots with chain_ok false
    std::size_t n_identity_violations = 0; // records or snapshots with identity_ok false
    std::size_t n_gap_violations = 0;
    std::size_t n_forbidden_entries = 0;   // product below bound_cr beyond tolerance
    double max_residual_var_identity = 0.0;
    double max_residual_cov_identity = 0.0;
    double max_residual_mean_identity = 0.0;
    double max_residual_q_identity = 0.0;
    double max_masked_fraction = 0.0;
    int exit_code = 0;
};

struct CorpusResult {
    std::string config_hash;
    std::string version;
    std::vector<StateRecord> records;
    Summary summary;
};

struct RunOptions {
    bool dynamics = false;   // run the evolution pipeline when the config has one
    bool keep_fields = false;
    std::optional<std::uint64_t> seed; // overrides random_states.seed and trajectories.seed
};

// Exit codes of the command line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

// Per-state failures are recorded and the run continues. States run in
// parallel; record order follows the config.
CorpusResult run_corpus(const RunConfig &config, const RunOptions &options = {});

// Replaces `key` in every listed state by each value in turn. Ids become
// "<id>@<key>=<value>".
RunConfig expand_sweep(const RunConfig &config, const std::string &key, const std::vector<double> &values);

Summary summarize(const std::vector<StateRecord> &records, double tol_identity);

nlohmann::ordered_json to_json(const CorpusResult &result);
CorpusResult corpus_from_json(const nlohmann::ordered_json &j);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

// Writes CSV files into `directory` and returns their paths:
//   fields          -> fields_<state_id>.csv (x, rho, p_q, osmotic, Q)
//   bounds_vs_param -> bounds.csv, one row per state
//   time_series     -> time_series.csv, one row per snapshot
// Throws missing_data when the result lacks what the kind needs.
std::vector<std::filesystem::path> emit_plot_data(const CorpusResult &result, PlotKind kind,
                                                  const std::filesystem::path &directory);

// result.json plus the configured plot files.
std::vector<std::filesystem::path> write_outputs(const CorpusResult &result, const OutputSpec &output,
                                                 const std::filesystem::path &directory);

inline constexpr const char *bounds_csv_header =
    "state_id,var_x,var_p_spectral,var_p_bohm,var_pq,cov_x_pq,fisher_I,mean_Q,bound_heisenberg,bound_rs,bound_cr,"
    "product,delta,residual_var_identity,residual_cov_identity,masked_fraction,chain_ok";

} // namespace qpf
