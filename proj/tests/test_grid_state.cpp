#include "doctest.h"
#include "oracles.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/fourier.hpp"
#include "qpfisher/grid.hpp"
#include "qpfisher/numerics.hpp"
#include "qpfisher/states.hpp"

#include <cmath>
#include <numbers>

using namespace qpf;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::io;
}

std::vector<double> sampled(const Grid1D &g, auto &&f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(g.x(i));
    }
    return v;
}

AnalyticState make(Family f) {
    AnalyticState s;
    s.family = f;
    return s;
}

std::vector<AnalyticState> family_samples() {
    std::vector<AnalyticState> out;
    out.push_back(make(Family::gaussian));
    auto c = make(Family::chirped_gaussian);
    c.alpha = 0.5;
    out.push_back(c);
    auto q = make(Family::cubic_phase_gaussian);
    q.beta = 1.0 / 3.0;
    out.push_back(q);
    auto h = make(Family::ho_eigenstate);
    h.n = 3;
    out.push_back(h);
    auto t = make(Family::two_gaussian_superposition);
    t.p0 = 0.5;
    t.phi = 1.0;
    out.push_back(t);
    auto b = make(Family::box_eigenstate);
    b.n = 2;
    out.push_back(b);
    return out;
}

} // namespace

TEST_CASE("make_grid spacing and errors") {
    const Grid1D g = make_grid(-20, 20, 4096);
    CHECK(g.spacing() == 40.0 / 4095.0);
    CHECK(g.x(0) == -20.0);
    CHECK(g.x(4095) == 20.0);
    CHECK(make_grid(0, 1, 16).spacing() == 1.0 / 15.0);
    CHECK(kind_of([] { make_grid(5, -5, 64); }) == ErrorKind::invalid_extent);
    CHECK(kind_of([] { make_grid(1, 1, 64); }) == ErrorKind::invalid_extent);
    CHECK(kind_of([] { make_grid(0, 1, 15); }) == ErrorKind::too_coarse);
}

TEST_CASE("grid windows keep the node positions") {
    const Grid1D g(-1, 1, 101);
    const Grid1D w = g.window(10, 41);
    CHECK(w.size() == 31);
    CHECK(w.x_min() == doctest::Approx(g.x(10)).epsilon(1e-15));
    CHECK(w.x_max() == doctest::Approx(g.x(40)).epsilon(1e-15));
    CHECK(w.spacing() == doctest::Approx(g.spacing()).epsilon(1e-14));
    CHECK(g.nearest_index(0.0) == 50);
    CHECK(g.nearest_index(-7.0) == 0);
    CHECK(g.nearest_index(7.0) == 100);
}

TEST_CASE("sample_analytic gaussian is real, positive and normalized") {
    const Grid1D g(-20, 20, 4096);
    const auto psi = sample_analytic(make(Family::gaussian), g);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    for (auto a : psi.amplitudes()) {
        CHECK(a.imag() == 0.0);
        CHECK(a.real() >= 0.0);
    }
}

TEST_CASE("sample_analytic reproduces the closed form before renormalization") {
    const Grid1D g(-20, 20, 4096);
    auto s = make(Family::cubic_phase_gaussian);
    s.beta = 0.2;
    s.p0 = 1.5;
    s.alpha = -0.3;
    const auto psi = sample_analytic(s, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(psi.amplitudes()[i] - evaluate(s, g.x(i), {})));
    }
    // The closed form is already normalized, renormalization changes it by ~1e-15.
    CHECK(worst < 1e-12);
}

TEST_CASE("ho_eigenstate n=1 is odd with a single node at the origin") {
    const Grid1D g(-10, 10, 1001);
    auto s = make(Family::ho_eigenstate);
    s.n = 1;
    const auto psi = sample_analytic(s, g);
    const auto a = psi.amplitudes();
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(a[i] + a[g.size() - 1 - i]) < 1e-14);
    }
    CHECK(std::abs(a[500]) < 1e-15);
    int sign_changes = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (a[i - 1].real() < 0.0 && a[i].real() > 0.0) {
            ++sign_changes;
        }
    }
    CHECK(sign_changes == 0);
    CHECK(a[400].real() < 0.0);
    CHECK(a[600].real() > 0.0);
}

TEST_CASE("sample_analytic rejects grids that do not cover the state") {
    CHECK(kind_of([] { sample_analytic(make(Family::gaussian), Grid1D(-2, 2, 64)); }) == ErrorKind::grid_too_small);
    auto b = make(Family::box_eigenstate);
    b.n = 1;
    b.x0 = 0.5;
    CHECK(kind_of([&] { sample_analytic(b, Grid1D(0, 1, 64)); }) == ErrorKind::grid_too_small);
    // Walls between nodes.
    b.x0 = 0.013;
    CHECK(kind_of([&] { sample_analytic(b, Grid1D(-1, 2, 64)); }) == ErrorKind::grid_misaligned);
}

TEST_CASE("box states are zero outside the walls and flagged non-spectral") {
    auto b = make(Family::box_eigenstate);
    b.n = 3;
    b.L = 2.0;
    const Grid1D g = suggested_grid(b, {}, 601);
    const auto psi = sample_analytic(b, g);
    CHECK_FALSE(psi.spectral_ok());
    const auto [lo, hi] = psi.support();
    CHECK(g.x(lo) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.x(hi - 1) == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i <= lo || i + 1 >= hi) {
            CHECK(psi.amplitudes()[i] == cplx{});
        }
    }
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    CHECK(kind_of([&] { to_momentum_space(psi); }) == ErrorKind::precondition);
}

TEST_CASE("state JSON parsing") {
    const auto s = parse_state(nlohmann::json::parse(
        R"({"id": "c", "family": "chirped_gaussian", "x0": 0.5, "p0": 1.0, "sigma": 2.0, "alpha": 0.25})"));
    CHECK(s.family == Family::chirped_gaussian);
    CHECK(s.id == "c");
    CHECK(s.sigma == 2.0);
    CHECK(s.alpha == 0.25);
    const auto again = parse_state(nlohmann::json::parse(to_json(s).dump()));
    CHECK(to_json(again) == to_json(s));

    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "gaussian", "sigmaa": 1})")); }) ==
          ErrorKind::config_parse);
    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "gaussian", "n": 1})")); }) ==
          ErrorKind::config_parse);
    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "gaussian", "sigma": -1})")); }) ==
          ErrorKind::config_parse);
    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "box_eigenstate", "n": 0})")); }) ==
          ErrorKind::config_parse);
    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "ho_eigenstate", "n": 1.5})")); }) ==
          ErrorKind::config_parse);
    CHECK(kind_of([] { parse_state(nlohmann::json::parse(R"({"family": "squeezed"})")); }) ==
          ErrorKind::config_parse);
}

TEST_CASE("derivative of simple fields") {
    const Grid1D g(-1, 1, 128);
    const std::vector<double> one(g.size(), 1.0);
    for (double d : derivative(one, g, 1)) {
        CHECK(std::abs(d) < 1e-12);
    }
    const auto x = g.coordinates();
    const auto dx = derivative(x, g, 1);
    for (double d : dx) {
        CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Exact for quartics, edges included.
    const auto quartic = sampled(g, [](double t) { return t * t * t * t - 2.0 * t * t * t + t; });
    const auto d2 = derivative(quartic, g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(d2[i] == doctest::Approx(12.0 * x[i] * x[i] - 12.0 * x[i]).epsilon(1e-7).scale(1.0));
    }
    CHECK(kind_of([&] { derivative(std::vector<double>(10, 0.0), g, 1); }) == ErrorKind::length_mismatch);
    CHECK(kind_of([&] { derivative(one, g, 3); }) == ErrorKind::precondition);
}

TEST_CASE("second derivative of a Gaussian matches the closed form") {
    const Grid1D g(-20, 20, 4096);
    const auto f = sampled(g, [](double x) { return std::exp(-x * x / 2); });
    const auto want = sampled(g, [](double x) { return (x * x - 1.0) * std::exp(-x * x / 2); });
    for (auto scheme : {DiffScheme::central4, DiffScheme::spectral}) {
        CAPTURE(static_cast<int>(scheme));
        CHECK(oracle::rel_max_error(derivative(f, g, 2, scheme), want) < 1e-8);
    }
}

TEST_CASE("FFT plan and wavenumber layout") {
    const std::size_t n = 64;
    const double dx = 0.25;
    const FftPlan plan(n);
    std::vector<cplx> f(n);
    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        f[j] = std::polar(1.0, 2.0 * pi * 5.0 * static_cast<double>(j) / static_cast<double>(n));
    }
    plan.forward(f, out);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(out[k] - (k == 5 ? cplx(n, 0.0) : cplx{})) < 1e-11);
    }
    std::vector<cplx> back(n);
    plan.backward(out, back);
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(std::abs(back[j] / static_cast<double>(n) - f[j]) < 1e-13);
    }
    const auto k = fft_wavenumbers(n, dx);
    const double dk = 2.0 * pi / (static_cast<double>(n) * dx);
    CHECK(k[0] == 0.0);
    CHECK(k[5] == doctest::Approx(5 * dk));
    CHECK(k[n / 2] == doctest::Approx(-static_cast<double>(n / 2) * dk));
    CHECK(k[n - 1] == doctest::Approx(-dk));
}

TEST_CASE("spectral and central4 derivatives agree on random band-limited states") {
    const Grid1D g(-20, 20, 2048);
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto psi = random_band_limited(g, {}, 11, k);
        const auto a = derivative(psi.amplitudes(), g, 1, DiffScheme::central4);
        const auto b = derivative(psi.amplitudes(), g, 1, DiffScheme::spectral);
        CHECK(oracle::rel_max_error(a, b) < 1e-6);
    }
}

TEST_CASE("integrate known integrals") {
    const Grid1D g(-20, 20, 4097);
    CHECK(std::abs(integrate(sampled(g, [](double x) { return oracle::normal_pdf(x); }), g) - 1.0) < 1e-12);
    const Grid1D unit(0, 1, 101);
    CHECK(integrate(std::vector<double>(101, 1.0), unit) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(integrate(sampled(g, [](double x) { return x * oracle::normal_pdf(x); }), g)) < 1e-14);
    // Odd interval count takes the 3/8 panel.
    const Grid1D odd(0, 1, 100);
    CHECK(integrate(std::vector<double>(100, 1.0), odd) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate(odd.coordinates(), odd) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kind_of([&] { integrate(std::vector<double>(3, 1.0), unit); }) == ErrorKind::length_mismatch);
}

TEST_CASE("quadrature converges at fourth order") {
    const double exact = std::exp(1.0) - 1.0;
    for (std::size_t n : {17, 18}) { // even and odd interval counts
        const Grid1D coarse(0, 1, n);
        const Grid1D fine(0, 1, 2 * n - 1);
        const double e1 = std::abs(integrate(sampled(coarse, [](double x) { return std::exp(x); }), coarse) - exact);
        const double e2 = std::abs(integrate(sampled(fine, [](double x) { return std::exp(x); }), fine) - exact);
        CAPTURE(n);
        CHECK(e1 / e2 >= 8.0);
    }
}

TEST_CASE("central4 first derivative converges at fourth order") {
    auto err = [](std::size_t n) {
        const Grid1D g(0, 1, n);
        const auto f = sampled(g, [](double x) { return std::sin(3.0 * x); });
        const auto want = sampled(g, [](double x) { return 3.0 * std::cos(3.0 * x); });
        return oracle::rel_max_error(derivative(f, g, 1), want);
    };
    CHECK(err(101) / err(201) >= 8.0);
}

TEST_CASE("momentum transform of a Gaussian") {
    const Grid1D g(-20, 20, 4096);
    const auto mom = to_momentum_space(sample_analytic(make(Family::gaussian), g));
    CHECK(std::abs(mom.norm() - 1.0) < 1e-9);
    CHECK(std::abs(mom.mean()) < 1e-12);
    CHECK(std::abs(mom.variance() - 0.25) < 1e-10);
    for (std::size_t k = 1; k < mom.p.size(); ++k) {
        CHECK(mom.p[k] > mom.p[k - 1]);
    }
    CHECK(mom.p.front() == doctest::Approx(-2048 * mom.dp));
    CHECK(mom.dp == doctest::Approx(2.0 * pi / (4096 * g.spacing())).epsilon(1e-14));
    // |psi~(p)|^2 against the closed form sqrt(2 sigma^2 / pi) exp(-2 sigma^2 p^2).
    const auto dens = mom.density();
    double worst = 0.0;
    for (std::size_t k = 0; k < dens.size(); ++k) {
        worst = std::max(worst, std::abs(dens[k] - std::sqrt(2.0 / pi) * std::exp(-2.0 * mom.p[k] * mom.p[k])));
    }
    CHECK(worst < 1e-12);

    auto boosted = make(Family::gaussian);
    boosted.p0 = 3.0;
    const auto mb = to_momentum_space(sample_analytic(boosted, g));
    CHECK(std::abs(mb.mean() - 3.0) < 1e-10);
    CHECK(std::abs(mb.variance() - 0.25) < 1e-10);
}

TEST_CASE("momentum transform agrees with a direct Fourier sum") {
    auto s = make(Family::cubic_phase_gaussian);
    s.x0 = 0.7;
    s.p0 = -1.2;
    s.beta = 0.1;
    const auto psi = sample_analytic(s, Grid1D(-12, 14, 256));
    const auto fast = to_momentum_space(psi);
    const auto slow = oracle::brute_force_momentum(psi);
    CHECK(fast.dp == doctest::Approx(slow.dp).epsilon(1e-14));
    for (std::size_t k = 0; k < slow.p.size(); ++k) {
        CHECK(fast.p[k] == doctest::Approx(slow.p[k]).epsilon(1e-12).scale(1.0));
    }
    CHECK(oracle::rel_max_error(fast.amplitude, slow.amplitude) < 1e-12);
}

TEST_CASE("momentum transform refuses states that reach the edge") {
    const Grid1D g(-5, 5, 256);
    std::vector<cplx> a(g.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::exp(-g.x(i) * g.x(i) / 20.0);
    }
    const auto psi = Wavefunction::normalized(g, a, {});
    // Edge amplitude is exp(-1.25) ~ 0.29 of the peak.
    CHECK(kind_of([&] { to_momentum_space(psi); }) == ErrorKind::boundary_leakage);
    a.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::exp(-g.x(i) * g.x(i) / 2.0);
    }
    a.back() = 0.1 * a[128];
    CHECK(kind_of([&] { to_momentum_space(Wavefunction::normalized(g, a, {})); }) == ErrorKind::boundary_leakage);
}

TEST_CASE("Parseval and normalization across the corpus") {
    for (const auto &s : family_samples()) {
        if (s.family == Family::box_eigenstate) {
            continue;
        }
        CAPTURE(to_string(s.family));
        const Grid1D g(-20, 20, 4096);
        const auto psi = sample_analytic(s, g);
        CHECK(std::abs(integrate(psi.density(), g) - 1.0) < 1e-12);
        CHECK(std::abs(to_momentum_space(psi).norm() - psi.norm()) < 1e-10);
    }
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Grid1D g(-20, 20, 4096);
        const auto psi = random_band_limited(g, {}, 5, k);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
        CHECK(std::abs(to_momentum_space(psi).norm() - psi.norm()) < 1e-10);
    }
}

TEST_CASE("sampled states reproduce their closed-form moments") {
    const Physics ph{};
    for (const auto &s : family_samples()) {
        CAPTURE(to_string(s.family));
        const Grid1D g = s.family == Family::box_eigenstate ? suggested_grid(s, ph, 4096) : Grid1D(-20, 20, 4096);
        const auto psi = sample_analytic(s, g);
        const auto rho = psi.density();
        const auto x = g.coordinates();
        std::vector<double> f(rho.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = x[i] * rho[i];
        const double mean = integrate_on_support(f, psi);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = (x[i] - mean) * (x[i] - mean) * rho[i];
        const double var = integrate_on_support(f, psi);
        CHECK(std::abs(std::sqrt(var) - s.density_std(ph)) < 1e-9 * s.density_std(ph) + 1e-12);
        const auto cf = closed_form_moments(s, ph);
        CHECK(cf.has_value() == (s.family != Family::two_gaussian_superposition));
        if (cf) {
            CHECK(std::abs(var - cf->var_x) < 1e-9 * cf->var_x);
            if (psi.spectral_ok()) {
                CHECK(std::abs(to_momentum_space(psi).variance() - cf->var_p) < 1e-9 * cf->var_p);
            }
        }
    }
}

TEST_CASE("random band-limited states are reproducible and node-free") {
    const Grid1D g(-20, 20, 4096);
    const auto a = random_band_limited(g, {}, 42, 3);
    const auto b = random_band_limited(g, {}, 42, 3);
    const auto c = random_band_limited(g, {}, 42, 4);
    CHECK(std::equal(a.amplitudes().begin(), a.amplitudes().end(), b.amplitudes().begin()));
    CHECK_FALSE(std::equal(a.amplitudes().begin(), a.amplitudes().end(), c.amplitudes().begin()));
    CHECK(a.decays(1e-8));
    // Modulation below 1 keeps the envelope factor away from zero.
    const auto rho = a.density();
    const auto peak = *std::max_element(rho.begin(), rho.end());
    const std::size_t mid = g.nearest_index(0.0);
    CHECK(rho[mid] > 1e-3 * peak);
}
