#include "qpfisher/dynamics.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/fourier.hpp"
#include "qpfisher/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

namespace qpf {

namespace {

std::size_t worker_count(std::size_t jobs) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    return std::clamp<std::size_t>(std::min(hw, jobs), 1, 16);
}

// Runs fn(begin, end) over [0, n) in contiguous chunks.
template <class F>
void parallel_chunks(std::size_t n, F &&fn) {
    const std::size_t workers = worker_count(n);
    if (workers == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::future<void>> jobs;
    for (std::size_t b = 0; b < n; b += chunk) {
        jobs.push_back(std::async(std::launch::async, [&fn, b, e = std::min(n, b + chunk)] { fn(b, e); }));
    }
    for (auto &j : jobs) {
        j.get();
    }
}

std::vector<double> probability_current(const Wavefunction &psi) {
    const auto amps = psi.amplitudes();
    const auto d = derivative(amps, psi.grid(), 1);
    std::vector<double> j(amps.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        j[i] = psi.hbar() / psi.mass() * (std::conj(amps[i]) * d[i]).imag();
    }
    return j;
}

} // namespace

Potential Potential::harmonic(double omega) {
    Potential p;
    p.kind = Kind::harmonic;
    p.omega = omega;
    return p;
}

Potential Potential::double_well(double barrier_height, double separation) {
    Potential p;
    p.kind = Kind::double_well;
    p.barrier_height = barrier_height;
    p.separation = separation;
    return p;
}

Potential Potential::sampled(std::vector<double> values) {
    Potential p;
    p.kind = Kind::sampled;
    p.samples = std::move(values);
    return p;
}

void Potential::validate() const {
    switch (kind) {
    case Kind::free: break;
    case Kind::harmonic:
        if (!(omega > 0.0) || !std::isfinite(omega)) raise(ErrorKind::invalid_state, "harmonic omega must be positive");
        break;
    case Kind::double_well:
        if (!(separation > 0.0) || !std::isfinite(barrier_height) || !std::isfinite(separation)) {
            raise(ErrorKind::invalid_state, "double well needs a finite height and a positive separation");
        }
        break;
    case Kind::sampled:
        if (std::any_of(samples.begin(), samples.end(), [](double v) { return !std::isfinite(v); })) {
            raise(ErrorKind::invalid_state, "sampled potential has non-finite values");
        }
        break;
    }
}

std::vector<double> Potential::on(const Grid1D &grid, const Physics &physics) const {
    validate();
    std::vector<double> v(grid.size(), 0.0);
    switch (kind) {
    case Kind::free: break;
    case Kind::harmonic:
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = 0.5 * physics.mass * omega * omega * grid.x(i) * grid.x(i);
        }
        break;
    case Kind::double_well:
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double u = 4.0 * grid.x(i) * grid.x(i) / (separation * separation) - 1.0;
            v[i] = barrier_height * u * u;
        }
        break;
    case Kind::sampled:
        if (samples.size() != grid.size()) {
            raise(ErrorKind::length_mismatch, "sampled potential has " + std::to_string(samples.size()) +
                                                  " values for a grid of " + std::to_string(grid.size()));
        }
        v = samples;
        break;
    }
    return v;
}

std::string Potential::name() const {
    switch (kind) {
    case Kind::free: return "free";
    case Kind::harmonic: return "harmonic";
    case Kind::double_well: return "double_well";
    case Kind::sampled: return "sampled";
    }
    return "unknown";
}

void EvolutionConfig::validate() const {
    potential.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        raise(ErrorKind::invalid_state, "dt must be positive");
    }
    if (!(t_final >= dt) || !std::isfinite(t_final)) {
        raise(ErrorKind::invalid_state, "t_final must be at least dt");
    }
    if (snapshot_stride == 0) {
        raise(ErrorKind::invalid_state, "snapshot_stride must be positive");
    }
}

Evolution split_step_evolve(const Wavefunction &psi0, const EvolutionConfig &config, double boundary_eps,
                            double tol_norm) {
    config.validate();
    if (!psi0.spectral_ok() || !psi0.full_support()) {
        raise(ErrorKind::precondition, "split-step evolution needs a state without hard walls");
    }
    psi0.require_decay(boundary_eps);

    const Grid1D &grid = psi0.grid();
    const std::size_t n = grid.size();
    const double hbar = psi0.hbar();
    const double mass = psi0.mass();
    const auto steps = static_cast<std::size_t>(std::ceil(config.t_final / config.dt - 1e-9));
    const double dt = config.t_final / static_cast<double>(steps);

    Evolution ev;
    ev.dt = dt;
    ev.potential = config.potential.on(grid, psi0.physics());
    double vmax = 0.0;
    for (double v : ev.potential) {
        vmax = std::max(vmax, std::abs(v));
    }
    if (dt * vmax / hbar > 0.5) {
        raise(ErrorKind::unstable_step, "dt * max|V| / hbar = " + std::to_string(dt * vmax / hbar) + " exceeds 0.5");
    }

    std::vector<cplx> half_kick(n);
    for (std::size_t i = 0; i < n; ++i) {
        half_kick[i] = std::polar(1.0, -0.5 * dt * ev.potential[i] / hbar);
    }
    const auto k = fft_wavenumbers(n, grid.spacing());
    std::vector<cplx> drift(n);
    for (std::size_t i = 0; i < n; ++i) {
        // The backward transform is unnormalized, fold 1/n in here.
        drift[i] = std::polar(1.0 / static_cast<double>(n), -0.5 * hbar * k[i] * k[i] * dt / mass);
    }

    const FftPlan plan(n);
    std::vector<cplx> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
    std::vector<cplx> spec(n);
    ev.times.push_back(0.0);
    ev.snapshots.push_back(psi0);
    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] *= half_kick[i];
        }
        plan.forward(psi, spec);
        for (std::size_t i = 0; i < n; ++i) {
            spec[i] *= drift[i];
        }
        plan.backward(spec, psi);
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] *= half_kick[i];
        }
        if (s % config.snapshot_stride == 0 || s == steps) {
            const double t = s == steps ? config.t_final : static_cast<double>(s) * dt;
            Wavefunction snap = psi0.with_amplitudes(psi, tol_norm);
            if (!snap.decays(boundary_eps)) {
                raise(ErrorKind::boundary_leakage, "state reached the grid edge at t = " + std::to_string(t) +
                                                       " (edge ratio " + std::to_string(snap.edge_ratio()) + ")");
            }
            ev.times.push_back(t);
            ev.snapshots.push_back(std::move(snap));
        }
    }
    return ev;
}

std::vector<double> sample_initial_positions(std::span<const double> rho, const Grid1D &grid,
                                             std::size_t n_particles, std::uint64_t seed) {
    const GridCdf cdf(rho, grid);
    auto rng = substream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(n_particles);
    for (auto &xi : x) {
        xi = cdf.quantile(unit(rng));
    }
    return x;
}

std::vector<double> TrajectoryEnsemble::active_positions(std::size_t snapshot) const {
    std::vector<double> out;
    const auto &row = positions.at(snapshot);
    for (std::size_t p = 0; p < row.size(); ++p) {
        if (!flagged[p]) {
            out.push_back(row[p]);
        }
    }
    return out;
}

bool TrajectoryEnsemble::order_preserved() const {
    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < initial_positions.size(); ++p) {
        if (!flagged[p]) {
            order.push_back(p);
        }
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return initial_positions[a] < initial_positions[b]; });
    for (const auto &row : positions) {
        for (std::size_t j = 1; j < order.size(); ++j) {
            if (row[order[j - 1]] > row[order[j]]) {
                return false;
            }
        }
    }
    return true;
}

TrajectoryEnsemble integrate_trajectories(const Evolution &evolution, std::span<const double> positions,
                                          double dt_traj, const BohmianOptions &opts) {
    return integrate_trajectories(evolution.snapshots, evolution.times, positions, dt_traj, opts);
}

TrajectoryEnsemble integrate_trajectories(std::span<const Wavefunction> snapshots, std::span<const double> times,
                                          std::span<const double> positions, double dt_traj,
                                          const BohmianOptions &opts) {
    if (snapshots.empty() || snapshots.size() != times.size()) {
        raise(ErrorKind::length_mismatch, "need one time per snapshot");
    }
    if (!(dt_traj > 0.0)) {
        raise(ErrorKind::precondition, "dt_traj must be positive");
    }
    const Grid1D &grid = snapshots.front().grid();
    const double h = grid.spacing();
    const std::size_t n = grid.size();

    // Substeps per snapshot interval.
    std::vector<std::size_t> substeps(times.size(), 0);
    for (std::size_t s = 1; s < times.size(); ++s) {
        const double ratio = (times[s] - times[s - 1]) / dt_traj;
        const double whole = std::round(ratio);
        if (whole < 1.0 || std::abs(ratio - whole) > 1e-6 * whole) {
            raise(ErrorKind::precondition, "dt_traj does not divide the snapshot interval");
        }
        substeps[s] = static_cast<std::size_t>(whole);
    }

    // Velocity fields; NaN marks masked nodes.
    std::vector<std::vector<double>> velocity(snapshots.size());
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        if (!(snapshots[s].grid() == grid)) {
            raise(ErrorKind::length_mismatch, "snapshots live on different grids");
        }
        auto p = local_momentum(snapshots[s], opts).values;
        for (auto &v : p) {
            v /= snapshots[s].mass();
        }
        velocity[s] = std::move(p);
    }

    TrajectoryEnsemble ens;
    ens.initial_positions.assign(positions.begin(), positions.end());
    ens.times.assign(times.begin(), times.end());
    ens.dt_traj = dt_traj;
    const std::size_t np = positions.size();
    ens.positions.assign(snapshots.size(), std::vector<double>(np));
    ens.flagged.assign(np, 0);
    ens.positions[0] = ens.initial_positions;

    // Cubic Lagrange interpolation on the 4 nodes around x. Returns NaN when
    // x is off the grid or a stencil node is masked.
    auto interp = [&](const std::vector<double> &v, double x) {
        const double t = (x - grid.x_min()) / h;
        if (!(t >= 0.0) || t > static_cast<double>(n - 1)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const auto i = static_cast<std::ptrdiff_t>(
            std::clamp<double>(std::floor(t), 1.0, static_cast<double>(n) - 3.0));
        const double u = t - static_cast<double>(i);
        const double f0 = v[static_cast<std::size_t>(i - 1)];
        const double f1 = v[static_cast<std::size_t>(i)];
        const double f2 = v[static_cast<std::size_t>(i + 1)];
        const double f3 = v[static_cast<std::size_t>(i + 2)];
        return -u * (u - 1.0) * (u - 2.0) / 6.0 * f0 + (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0 * f1 -
               (u + 1.0) * u * (u - 2.0) / 2.0 * f2 + (u + 1.0) * u * (u - 1.0) / 6.0 * f3;
    };

    parallel_chunks(np, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            double x = ens.initial_positions[p];
            bool alive = std::isfinite(interp(velocity[0], x));
            for (std::size_t s = 1; s < snapshots.size(); ++s) {
                const std::size_t m = substeps[s];
                const double ds = (times[s] - times[s - 1]) / static_cast<double>(m);
                const auto &va = velocity[s - 1];
                const auto &vb = velocity[s];
                auto vel = [&](double xx, double w) {
                    return (1.0 - w) * interp(va, xx) + w * interp(vb, xx);
                };
                for (std::size_t j = 0; alive && j < m; ++j) {
                    const double w0 = static_cast<double>(j) / static_cast<double>(m);
                    const double wh = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
                    const double w1 = static_cast<double>(j + 1) / static_cast<double>(m);
                    const double k1 = vel(x, w0);
                    const double k2 = vel(x + 0.5 * ds * k1, wh);
                    const double k3 = vel(x + 0.5 * ds * k2, wh);
                    const double k4 = vel(x + ds * k3, w1);
                    const double next = x + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    if (!std::isfinite(next)) {
                        alive = false;
                        break;
                    }
                    x = next;
                }
                ens.positions[s][p] = x;
            }
            ens.flagged[p] = alive ? 0 : 1;
        }
    });
    ens.node_encounters = static_cast<std::size_t>(std::count(ens.flagged.begin(), ens.flagged.end(), 1));
    return ens;
}

double equivariance_distance(const TrajectoryEnsemble &ensemble, std::size_t snapshot,
                             std::span<const double> density, const Grid1D &grid) {
    const auto x = ensemble.active_positions(snapshot);
    if (x.size() < 1000) {
        raise(ErrorKind::too_few_trajectories,
              "only " + std::to_string(x.size()) + " unflagged trajectories (need 1000)");
    }
    return ks_distance(x, density, grid);
}

std::vector<TimePoint> bounds_over_time(const Evolution &evolution, const MomentOptions &opts,
                                        double tol_identity) {
    std::vector<TimePoint> out(evolution.snapshots.size());
    parallel_chunks(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const Wavefunction &psi = evolution.snapshots[s];
            out[s].t = evolution.times[s];
            out[s].stats = moment_stats(psi, opts);
            out[s].report = bounds_report(out[s].stats, psi.hbar(), tol_identity);
        }
    });
    return out;
}

double continuity_residual(const Evolution &evolution, std::size_t k) {
    if (k + 1 >= evolution.snapshots.size()) {
        raise(ErrorKind::precondition, "continuity residual needs a following snapshot");
    }
    const Wavefunction &a = evolution.snapshots[k];
    const Wavefunction &b = evolution.snapshots[k + 1];
    const double dt = evolution.times[k + 1] - evolution.times[k];
    const auto ra = a.density();
    const auto rb = b.density();
    const auto j = probability_current(a);
    const auto dj = derivative(std::span<const double>(j), a.grid(), 1);
    std::vector<double> r2(ra.size());
    for (std::size_t i = 0; i < r2.size(); ++i) {
        const double r = (rb[i] - ra[i]) / dt + dj[i];
        r2[i] = r * r;
    }
    return std::sqrt(integrate(r2, a.grid()));
}

double max_continuity_residual(const Evolution &evolution) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < evolution.snapshots.size(); ++k) {
        worst = std::max(worst, continuity_residual(evolution, k));
    }
    return worst;
}

double energy(const Wavefunction &psi, std::span<const double> potential) {
    if (potential.size() != psi.grid().size()) {
        raise(ErrorKind::length_mismatch, "potential does not match the grid");
    }
    const MomentumRepresentation mom = to_momentum_space(psi);
    double p2 = 0.0;
    for (std::size_t i = 0; i < mom.p.size(); ++i) {
        p2 += mom.p[i] * mom.p[i] * std::norm(mom.amplitude[i]);
    }
    p2 *= mom.dp;
    const auto rho = psi.density();
    std::vector<double> rv(rho.size());
    for (std::size_t i = 0; i < rv.size(); ++i) {
        rv[i] = rho[i] * potential[i];
    }
    return 0.5 * p2 / psi.mass() + integrate_on_support(rv, psi);
}

} // namespace qpf
