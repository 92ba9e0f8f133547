// Command line front end: verify, evolve and sweep over a JSON run config.

#include "qpfisher/config.hpp"
#include "qpfisher/corpus.hpp"
#include "qpfisher/error.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qpf;

void print_summary(const CorpusResult &result, const std::vector<std::filesystem::path> &files) {
    const Summary &s = result.summary;
    for (const auto &r : result.records) {
        std::cout << r.id << ": ";
        if (r.bounds) {
            std::cout << "product=" << format_double(r.bounds->product) << " cr=" << format_double(r.bounds->bound_cr)
                      << " rs=" << format_double(r.bounds->bound_rs)
                      << " delta=" << format_double(r.bounds->delta)
                      << (r.bounds->chain_ok ? " chain ok" : " CHAIN VIOLATED")
                      << (r.bounds->identity_ok ? "" : " IDENTITY RESIDUAL ABOVE TOLERANCE");
        }
        for (const auto &e : r.errors) {
            std::cout << " [" << e.stage << " error " << to_string(e.kind) << ": " << e.message << "]";
        }
        std::cout << "\n";
    }
    std::cout << s.n_states << " states, " << s.n_chain_ok << " chain ok, " << s.n_errored << " errored, "
              << s.n_chain_violations << " chain violations, " << s.n_identity_violations
              << " identity violations; max var residual " << format_double(s.max_residual_var_identity)
              << ", max Q residual " << format_double(s.max_residual_q_identity) << "\n";
    for (const auto &f : files) {
        std::cout << "wrote " << f.string() << "\n";
    }
}

int finish(const RunConfig &cfg, const RunOptions &opts, const std::optional<std::string> &out,
           OutputSpec output) {
    const CorpusResult result = run_corpus(cfg, opts);
    const std::filesystem::path dir = out ? std::filesystem::path(*out) : cfg.output.directory;
    const auto files = write_outputs(result, output, dir);
    print_summary(result, files);
    return result.summary.exit_code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Bohmian quantum potential, Fisher information and uncertainty bound checks"};
    app.set_version_flag("--version", std::string(qpf::software_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::string param;
    std::vector<double> values;

    auto *verify = app.add_subcommand("verify", "Check identities and the bound chain for every configured state");
    verify->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    verify->add_option("--out", out, "Output directory (overrides output.directory)");
    verify->add_option("--seed", seed, "Seed for random states and trajectories");

    auto *evolve = app.add_subcommand("evolve", "Evolve every state and track the bound chain over time");
    evolve->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    evolve->add_option("--out", out, "Output directory")->required();

    auto *sweep = app.add_subcommand("sweep", "Repeat verify over values of one state parameter");
    sweep->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", param, "State parameter key, e.g. sigma")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qpf::exit_config;
    }

    try {
        qpf::RunConfig cfg = qpf::load_config(config_path);
        qpf::RunOptions opts;
        opts.seed = seed;
        qpf::OutputSpec output = cfg.output;
        opts.keep_fields =
            std::find(output.plots.begin(), output.plots.end(), qpf::PlotKind::fields) != output.plots.end();

        if (*evolve) {
            if (!cfg.dynamics) {
                std::cerr << "config error: evolve needs a 'dynamics' section\n";
                return qpf::exit_config;
            }
            opts.dynamics = true;
            if (std::find(output.plots.begin(), output.plots.end(), qpf::PlotKind::time_series) ==
                output.plots.end()) {
                output.plots.push_back(qpf::PlotKind::time_series);
            }
        } else if (*sweep) {
            cfg = qpf::expand_sweep(cfg, param, values);
        }
        return finish(cfg, opts, out, output);
    } catch (const qpf::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == qpf::ErrorKind::config_parse ? qpf::exit_config : qpf::exit_numerical;
    }
}
