#include "qpfisher/states.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

namespace qpf {

namespace {

using std::numbers::pi;

constexpr std::array<std::pair<Family, std::string_view>, 6> family_names{{
    {Family::gaussian, "gaussian"},
    {Family::chirped_gaussian, "chirped_gaussian"},
    {Family::cubic_phase_gaussian, "cubic_phase_gaussian"},
    {Family::ho_eigenstate, "ho_eigenstate"},
    {Family::two_gaussian_superposition, "two_gaussian_superposition"},
    {Family::box_eigenstate, "box_eigenstate"},
}};

bool gaussian_envelope(Family f) {
    return f == Family::gaussian || f == Family::chirped_gaussian || f == Family::cubic_phase_gaussian;
}

std::vector<std::string_view> keys_for(Family f) {
    switch (f) {
    case Family::gaussian:
    case Family::chirped_gaussian:
    case Family::cubic_phase_gaussian: return {"x0", "p0", "sigma", "alpha", "beta"};
    case Family::ho_eigenstate: return {"x0", "n", "omega"};
    case Family::two_gaussian_superposition: return {"x0", "p0", "sigma", "a", "phi"};
    case Family::box_eigenstate: return {"x0", "L", "n"};
    }
    return {};
}

// Overlap factor of the two superposed Gaussians.
double two_gaussian_interference(const AnalyticState &s) {
    return std::cos(s.phi) * std::exp(-s.a * s.a / (8.0 * s.sigma * s.sigma));
}

// Normalized oscillator eigenfunction in the dimensionless coordinate xi.
double hermite_function(int n, double xi) {
    double prev = 0.0;
    double cur = std::exp(-0.5 * xi * xi) / std::pow(pi, 0.25);
    for (int k = 0; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

[[noreturn]] void bad_config(const std::string &context, const std::string &msg) {
    raise(ErrorKind::config_parse, context + ": " + msg);
}

} // namespace

std::string_view to_string(Family family) noexcept {
    for (const auto &[f, name] : family_names) {
        if (f == family) {
            return name;
        }
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
    for (const auto &[f, n] : family_names) {
        if (n == name) {
            return f;
        }
    }
    return std::nullopt;
}

void AnalyticState::validate() const {
    auto fail = [&](const std::string &msg) {
        raise(ErrorKind::invalid_state, std::string(to_string(family)) + (id.empty() ? "" : " '" + id + "'") +
                                            ": " + msg);
    };
    for (double v : {x0, p0, sigma, alpha, beta, omega, a, phi, L}) {
        if (!std::isfinite(v)) {
            fail("parameters must be finite");
        }
    }
    switch (family) {
    case Family::gaussian:
    case Family::chirped_gaussian:
    case Family::cubic_phase_gaussian:
        if (!(sigma > 0.0)) fail("sigma must be positive");
        break;
    case Family::ho_eigenstate:
        if (n < 0) fail("n must be >= 0");
        if (!(omega > 0.0)) fail("omega must be positive");
        break;
    case Family::two_gaussian_superposition:
        if (!(sigma > 0.0)) fail("sigma must be positive");
        if (1.0 + two_gaussian_interference(*this) < 1e-12) fail("the two components cancel");
        break;
    case Family::box_eigenstate:
        if (n < 1) fail("n must be >= 1");
        if (!(L > 0.0)) fail("L must be positive");
        break;
    }
}

double AnalyticState::center() const noexcept { return family == Family::box_eigenstate ? x0 + 0.5 * L : x0; }

double AnalyticState::density_std(const Physics &physics) const {
    switch (family) {
    case Family::gaussian:
    case Family::chirped_gaussian:
    case Family::cubic_phase_gaussian: return sigma;
    case Family::ho_eigenstate: return std::sqrt((n + 0.5) * physics.hbar / (physics.mass * omega));
    case Family::two_gaussian_superposition:
        return std::sqrt(sigma * sigma + a * a / (4.0 * (1.0 + two_gaussian_interference(*this))));
    case Family::box_eigenstate: {
        const double k = n * pi;
        return L * std::sqrt(1.0 / 12.0 - 1.0 / (2.0 * k * k));
    }
    }
    return 0.0;
}

AnalyticState parse_state(const nlohmann::json &spec, const std::string &context) {
    if (!spec.is_object()) {
        bad_config(context, "expected an object");
    }
    AnalyticState s;
    const auto fam = spec.find("family");
    if (fam == spec.end() || !fam->is_string()) {
        bad_config(context, "missing string key 'family'");
    }
    const auto family = parse_family(fam->get<std::string>());
    if (!family) {
        bad_config(context + ".family", "unknown family '" + fam->get<std::string>() + "'");
    }
    s.family = *family;
    const auto allowed = keys_for(s.family);
    for (const auto &[key, value] : spec.items()) {
        const std::string where = context + "." + key;
        if (key == "family") {
            continue;
        }
        if (key == "id") {
            if (!value.is_string()) bad_config(where, "expected a string");
            s.id = value.get<std::string>();
            continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad_config(where, "key not recognized for family " + std::string(to_string(s.family)));
        }
        if (!value.is_number()) {
            bad_config(where, "expected a number");
        }
        set_parameter(s, key, value.get<double>());
    }
    try {
        s.validate();
    } catch (const Error &e) {
        bad_config(context, e.what());
    }
    return s;
}

void set_parameter(AnalyticState &s, std::string_view key, double value) {
    const auto allowed = keys_for(s.family);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        raise(ErrorKind::config_parse,
              "parameter '" + std::string(key) + "' does not apply to family " + std::string(to_string(s.family)));
    }
    if (key == "n") {
        if (value != std::floor(value) || std::abs(value) > 1e6) {
            raise(ErrorKind::config_parse, "parameter 'n' must be an integer");
        }
        s.n = static_cast<int>(value);
    } else if (key == "x0") {
        s.x0 = value;
    } else if (key == "p0") {
        s.p0 = value;
    } else if (key == "sigma") {
        s.sigma = value;
    } else if (key == "alpha") {
        s.alpha = value;
    } else if (key == "beta") {
        s.beta = value;
    } else if (key == "omega") {
        s.omega = value;
    } else if (key == "a") {
        s.a = value;
    } else if (key == "phi") {
        s.phi = value;
    } else if (key == "L") {
        s.L = value;
    }
}

nlohmann::ordered_json to_json(const AnalyticState &s) {
    nlohmann::ordered_json j;
    if (!s.id.empty()) {
        j["id"] = s.id;
    }
    j["family"] = std::string(to_string(s.family));
    for (const auto key : keys_for(s.family)) {
        const std::string k(key);
        if (k == "n") j[k] = s.n;
        else if (k == "x0") j[k] = s.x0;
        else if (k == "p0") j[k] = s.p0;
        else if (k == "sigma") j[k] = s.sigma;
        else if (k == "alpha") j[k] = s.alpha;
        else if (k == "beta") j[k] = s.beta;
        else if (k == "omega") j[k] = s.omega;
        else if (k == "a") j[k] = s.a;
        else if (k == "phi") j[k] = s.phi;
        else if (k == "L") j[k] = s.L;
    }
    return j;
}

std::optional<ClosedFormMoments> closed_form_moments(const AnalyticState &s, const Physics &physics) {
    const double hbar = physics.hbar;
    const double m = physics.mass;
    if (gaussian_envelope(s.family)) {
        const double s2 = s.sigma * s.sigma;
        const double var_pq = 4.0 * s.alpha * s.alpha * s2 + 18.0 * s.beta * s.beta * s2 * s2;
        return ClosedFormMoments{s2, var_pq + hbar * hbar / (4.0 * s2), 2.0 * s.alpha * s2, 1.0 / s2};
    }
    switch (s.family) {
    case Family::ho_eigenstate: {
        const double level = s.n + 0.5;
        return ClosedFormMoments{level * hbar / (m * s.omega), level * hbar * m * s.omega, 0.0,
                                 4.0 * level * m * s.omega / hbar};
    }
    case Family::box_eigenstate: {
        const double k = s.n * pi / s.L;
        const double sd = s.density_std(physics);
        return ClosedFormMoments{sd * sd, hbar * hbar * k * k, 0.0, 4.0 * k * k};
    }
    default: return std::nullopt;
    }
}

cplx evaluate(const AnalyticState &s, double x, const Physics &physics) {
    const double hbar = physics.hbar;
    const double u = x - s.x0;
    switch (s.family) {
    case Family::gaussian:
    case Family::chirped_gaussian:
    case Family::cubic_phase_gaussian: {
        const double amp = std::exp(-u * u / (4.0 * s.sigma * s.sigma)) / std::pow(2.0 * pi * s.sigma * s.sigma, 0.25);
        const double phase = (s.p0 * u + s.alpha * u * u + s.beta * u * u * u) / hbar;
        return std::polar(amp, phase);
    }
    case Family::ho_eigenstate: {
        const double scale = std::sqrt(physics.mass * s.omega / hbar);
        return {std::sqrt(scale) * hermite_function(s.n, scale * u), 0.0};
    }
    case Family::two_gaussian_superposition: {
        const double w = 4.0 * s.sigma * s.sigma;
        const double left = std::exp(-(u - 0.5 * s.a) * (u - 0.5 * s.a) / w);
        const double right = std::exp(-(u + 0.5 * s.a) * (u + 0.5 * s.a) / w);
        return (cplx(left, 0.0) + std::polar(right, s.phi)) * std::polar(1.0, s.p0 * u / hbar);
    }
    case Family::box_eigenstate:
        if (u <= 0.0 || u >= s.L) {
            return {};
        }
        return {std::sqrt(2.0 / s.L) * std::sin(s.n * pi * u / s.L), 0.0};
    }
    return {};
}

Wavefunction sample_analytic(const AnalyticState &s, const Grid1D &grid, const Physics &physics,
                             const Tolerances &tol) {
    s.validate();
    const std::string name = std::string(to_string(s.family)) + (s.id.empty() ? "" : " '" + s.id + "'");
    const std::size_t n = grid.size();
    std::vector<cplx> amps(n);

    if (s.family == Family::box_eigenstate) {
        if (s.x0 < grid.x_min() || s.x0 + s.L > grid.x_max()) {
            raise(ErrorKind::grid_too_small, name + ": box walls lie outside the grid");
        }
        const double h = grid.spacing();
        const std::size_t left = grid.nearest_index(s.x0);
        const std::size_t right = grid.nearest_index(s.x0 + s.L);
        if (std::abs(grid.x(left) - s.x0) > 1e-6 * h || std::abs(grid.x(right) - (s.x0 + s.L)) > 1e-6 * h) {
            raise(ErrorKind::grid_misaligned, name + ": box walls must coincide with grid nodes");
        }
        for (std::size_t i = left + 1; i < right; ++i) {
            amps[i] = evaluate(s, grid.x(i), physics);
        }
        // Nodes on the walls stay exactly zero.
        return Wavefunction::normalized(grid, std::move(amps), physics, Support{left, right + 1}, false);
    }

    const double c = s.center();
    const double sd = s.density_std(physics);
    if (c - 5.0 * sd < grid.x_min() || c + 5.0 * sd > grid.x_max()) {
        raise(ErrorKind::grid_too_small, name + ": grid does not cover 10 standard deviations of the density");
    }
    for (std::size_t i = 0; i < n; ++i) {
        amps[i] = evaluate(s, grid.x(i), physics);
    }
    auto psi = Wavefunction::normalized(grid, std::move(amps), physics);
    if (!psi.decays(tol.boundary_eps)) {
        raise(ErrorKind::grid_too_small, name + ": amplitude at the grid edge is " + std::to_string(psi.edge_ratio()) +
                                             " of the peak (needs < " + std::to_string(tol.boundary_eps) + ")");
    }
    return psi;
}

Grid1D suggested_grid(const AnalyticState &s, const Physics &physics, std::size_t n) {
    s.validate();
    if (n < min_grid_points) {
        raise(ErrorKind::too_coarse, "suggested grid needs at least " + std::to_string(min_grid_points) + " points");
    }
    switch (s.family) {
    case Family::box_eigenstate: {
        const std::size_t intervals = n - 1;
        const std::size_t pad = intervals / 6;
        const std::size_t inside = intervals - 2 * pad;
        const double h = s.L / static_cast<double>(inside);
        return Grid1D(s.x0 - static_cast<double>(pad) * h, s.x0 + s.L + static_cast<double>(pad) * h, n);
    }
    case Family::ho_eigenstate: {
        const double ell = std::sqrt(physics.hbar / (physics.mass * s.omega));
        // Past the turning point sqrt(2n+1) the tail needs ~7 lengths to decay;
        // high n also needs room for the 5-sigma coverage check.
        const double half = std::max(std::sqrt(2.0 * s.n + 1.0) + 7.0, 5.5 * std::sqrt(s.n + 0.5)) * ell;
        return Grid1D(s.x0 - half, s.x0 + half, n);
    }
    case Family::two_gaussian_superposition: {
        const double half = 0.5 * std::abs(s.a) + 10.0 * s.sigma;
        return Grid1D(s.x0 - half, s.x0 + half, n);
    }
    default: return Grid1D(s.x0 - 10.0 * s.sigma, s.x0 + 10.0 * s.sigma, n);
    }
}

Wavefunction random_band_limited(const Grid1D &grid, const Physics &physics, std::uint64_t seed,
                                 std::uint64_t index) {
    auto rng = substream(seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double center = -2.0 + 4.0 * unit(rng);
    const double width = 1.0 + unit(rng);
    const double p0 = -1.0 + 2.0 * unit(rng);
    constexpr int modes = 3;
    constexpr double kappa = 0.5;

    std::vector<std::pair<double, cplx>> terms;
    double total = 0.0;
    for (int j = -modes; j <= modes; ++j) {
        if (j == 0) {
            continue;
        }
        const double r = unit(rng) / (j * j);
        terms.emplace_back(kappa * j, std::polar(r, 2.0 * pi * unit(rng)));
        total += r;
    }
    const double modulation = 0.3 + 0.35 * unit(rng);
    for (auto &t : terms) {
        t.second *= modulation / total;
    }

    std::vector<cplx> amps(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid.x(i) - center;
        cplx f = 1.0;
        for (const auto &[q, c] : terms) {
            f += c * std::polar(1.0, q * u);
        }
        amps[i] = std::exp(-u * u / (4.0 * width * width)) * std::polar(1.0, p0 * u / physics.hbar) * f;
    }
    return Wavefunction::normalized(grid, std::move(amps), physics);
}

} // namespace qpf
