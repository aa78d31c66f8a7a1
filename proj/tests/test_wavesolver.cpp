#include "doctest.h"

#include <cmath>
#include <complex>

#include "semilab/fft.hpp"
#include "semilab/source.hpp"
#include "semilab/wavesolver.hpp"

using namespace semilab;

namespace {

GridSpec grid1d(int N, double length) {
    GridSpec g;
    g.n = 1;
    g.dims = {N};
    g.spacing = {length / N};
    g.origin = {-0.5 * length};
    return g;
}

GridField gaussian_packet(const GridSpec& g, double h, double x0, double k0, double width) {
    GridField u(g, h);
    for (int j = 0; j < g.dims[0]; ++j) {
        const double x = g.coord(0, j);
        u.data[j] = std::exp(-sq(x - x0) / (2.0 * sq(width))) *
                    std::exp(Complex(0.0, k0 * (x - x0) / h));
    }
    return u;
}

SpongeSpec no_sponge() {
    SpongeSpec s;
    s.enabled = false;
    return s;
}

} // namespace

TEST_CASE("free step matches the exact Fourier propagator") {
    const double h = 0.25, dt = 0.01;
    const GridSpec g = grid1d(512, 32.0);
    const GridField u0 = gaussian_packet(g, h, 0.0, 0.8, 1.0);
    PotentialPair free_pots;

    GridField u = u0;
    const int steps = 40;
    const Propagator prop(g, h, dt, free_pots, no_sponge(), 0.0);
    for (int s = 0; s < steps; ++s) prop.step(u.data);

    // exact: single multiplier e^{-i T h k^2}
    GridField exact = u0;
    fft_forward(exact.data, g.dims);
    for (int j = 0; j < g.dims[0]; ++j) {
        const double k = g.wavenumber(0, j);
        exact.data[j] *= std::exp(Complex(0.0, -steps * dt * h * k * k));
    }
    fft_backward(exact.data, g.dims);
    for (auto& v : exact.data) v *= 1.0 / g.size();

    double err = 0.0;
    for (int j = 0; j < g.dims[0]; ++j) err = std::max(err, std::abs(u.data[j] - exact.data[j]));
    CHECK(err < 1e-10);
}

TEST_CASE("unitarity drift with V2 = 0 stays below 1e-6 per unit time") {
    const double h = 0.25, dt = 0.005, T = 2.0;
    const GridSpec g = grid1d(512, 32.0);
    GridField u = gaussian_packet(g, h, -2.0, 0.9, 1.0);
    PotentialPair pots;
    pots.V1.terms.push_back({PotentialTerm::Kind::gaussian, 0.4, {0.0}, 1.5, 1.0});
    const double n0 = l2_norm(u);
    const Propagator prop(g, h, dt, pots, no_sponge(), 0.0);
    for (int s = 0; s < static_cast<int>(T / dt); ++s) prop.step(u.data);
    CHECK(std::abs(l2_norm(u) - n0) <= 1e-6 * T * n0);
}

TEST_CASE("constant absorption decays the norm like exp(-c t)") {
    const double h = 0.25, dt = 0.005, T = 1.5, c = 0.3;
    const GridSpec g = grid1d(512, 32.0);
    GridField u = gaussian_packet(g, h, 0.0, 0.7, 1.0);
    PotentialPair pots;
    pots.V2.terms.push_back({PotentialTerm::Kind::constant, c, {}, 1.0, 1.0});
    const double n0 = l2_norm(u);
    const Propagator prop(g, h, dt, pots, no_sponge(), 0.0);
    for (int s = 0; s < static_cast<int>(std::round(T / dt)); ++s) prop.step(u.data);
    CHECK(l2_norm(u) == doctest::Approx(std::exp(-c * T) * n0).epsilon(1e-6));
}

TEST_CASE("splitting is second order in dt") {
    const double h = 0.25, T = 1.0;
    const GridSpec g = grid1d(512, 32.0);
    const GridField u0 = gaussian_packet(g, h, -2.0, 0.9, 1.0);
    PotentialPair pots;
    pots.V1.terms.push_back({PotentialTerm::Kind::gaussian, 0.4, {0.0}, 1.2, 1.0});

    auto evolve = [&](double dt) {
        GridField u = u0;
        const Propagator prop(g, h, dt, pots, no_sponge(), 0.0);
        const int steps = static_cast<int>(std::round(T / dt));
        for (int s = 0; s < steps; ++s) prop.step(u.data);
        return u;
    };
    const double dt = 0.02;
    const GridField u1 = evolve(dt), u2 = evolve(dt / 2), u4 = evolve(dt / 4);
    auto dist = [](const GridField& a, const GridField& b) {
        double s = 0.0;
        for (std::size_t f = 0; f < a.data.size(); ++f) s += std::norm(a.data[f] - b.data[f]);
        return std::sqrt(s * a.spec.spacing[0]);
    };
    const double ratio = dist(u1, u2) / dist(u2, u4);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("partial solution matches the free Fourier resolvent") {
    const double h = 1.0 / 16;
    const GridSpec g = grid1d(1536, 24.0);
    const Submanifold gamma = Submanifold::make_point({0.0});
    const GridField Sh =
        assemble_source(gamma, make_amplitude("constant", 1.0, 0.6), make_gaussian_profile(1), h, g);

    EnergyTrack track;
    track.E0 = 1.0;
    track.Etilde = {0.0, 1.0};
    track.h = h;
    track.e1 = 0.9;
    track.e2 = 1.1;
    track.sigma1 = 0.1;
    CutoffFunction eta;
    eta.T = 7.0;
    eta.tau0 = 1.0;
    PotentialPair free_pots;
    SpongeSpec sponge; // default absorbing layer
    const double dt = h / (4.0 * track.e2);

    PartialSolutionDiag diag;
    const GridField uT = partial_solution(Sh, track, eta, dt, free_pots, sponge, &diag);
    CHECK(diag.steps > 100);

    // oracle: resolvent symbol applied to the discrete source spectrum
    GridField exact(g, h);
    {
        std::vector<Complex> spec = Sh.data;
        fft_forward(spec, g.dims);
        const Complex Eh = track.Eh();
        for (int j = 0; j < g.dims[0]; ++j) {
            const double k = g.wavenumber(0, j);
            spec[j] /= (sq(h * k) - Eh);
        }
        fft_backward(spec, g.dims);
        for (auto& v : spec) v *= 1.0 / g.size();
        exact.data = spec;
    }

    // compare away from the sponge
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g.dims[0]; ++j) {
        const double x = g.coord(0, j);
        if (std::abs(x) > 6.0) continue;
        num += std::norm(uT.data[j] - exact.data[j]);
        den += std::norm(exact.data[j]);
    }
    CHECK(std::sqrt(num / den) <= 0.01);
}

TEST_CASE("partial solution is linear and vanishes for the zero source") {
    const double h = 0.125;
    const GridSpec g = grid1d(512, 16.0);
    EnergyTrack track;
    track.h = h;
    CutoffFunction eta;
    eta.T = 3.0;
    PotentialPair pots;
    SpongeSpec sponge;
    const double dt = h / 4.4;

    GridField zero(g, h);
    const GridField uz = partial_solution(zero, track, eta, dt, pots, sponge);
    CHECK(max_abs(uz) == 0.0);

    const Submanifold gamma = Submanifold::make_point({0.0});
    const GridField s1 =
        assemble_source(gamma, make_amplitude("constant", 1.0, 0.6), make_gaussian_profile(1), h, g);
    GridField s2 = s1;
    for (auto& v : s2.data) v *= Complex(0.3, -0.4);
    const GridField u1 = partial_solution(s1, track, eta, dt, pots, sponge);
    const GridField u2 = partial_solution(s2, track, eta, dt, pots, sponge);
    double worst = 0.0;
    for (std::size_t f = 0; f < u1.data.size(); ++f)
        worst = std::max(worst, std::abs(u2.data[f] - Complex(0.3, -0.4) * u1.data[f]));
    CHECK(worst <= 1e-12 * max_abs(u1));
}

TEST_CASE("doubling the cutoff time changes the solution by the damped tail") {
    const double h = 0.125;
    const GridSpec g = grid1d(512, 16.0);
    const Submanifold gamma = Submanifold::make_point({0.0});
    const GridField Sh =
        assemble_source(gamma, make_amplitude("constant", 1.0, 0.6), make_gaussian_profile(1), h, g);
    EnergyTrack track;
    track.h = h;
    PotentialPair pots;
    SpongeSpec sponge;
    const double dt = h / 4.4;
    const double T = 3.0;

    CutoffFunction etaT{T, 1.0};
    CutoffFunction eta2T{2.0 * T, 1.0};
    const GridField uT = partial_solution(Sh, track, etaT, dt, pots, sponge);
    const GridField u2T = partial_solution(Sh, track, eta2T, dt, pots, sponge);
    double diff = 0.0;
    for (std::size_t f = 0; f < uT.data.size(); ++f)
        diff += std::norm(u2T.data[f] - uT.data[f]);
    diff = std::sqrt(diff * g.spacing[0]);
    // tail bound e^{-2 T Im Etilde} with a moderate constant
    double base = 0.0;
    for (const auto& v : u2T.data) base += std::norm(v);
    base = std::sqrt(base * g.spacing[0]);
    CHECK(diff <= 10.0 * std::exp(-2.0 * T) * base);
}

TEST_CASE("eta-weighted integrand norm is non-increasing past the cutoff") {
    const double h = 0.125;
    const GridSpec g = grid1d(512, 16.0);
    const Submanifold gamma = Submanifold::make_point({0.0});
    const GridField Sh =
        assemble_source(gamma, make_amplitude("constant", 1.0, 0.6), make_gaussian_profile(1), h, g);
    EnergyTrack track;
    track.h = h;
    PotentialPair pots;
    pots.V2.terms.push_back({PotentialTerm::Kind::gaussian, 0.2, {0.0}, 2.0, 1.0});
    SpongeSpec sponge;
    CutoffFunction eta{2.0, 1.0};
    PartialSolutionDiag diag;
    partial_solution(Sh, track, eta, h / 4.4, pots, sponge, &diag);
    const double dt = h / 4.4;
    double prev = -1.0;
    for (std::size_t k = 0; k < diag.norm_trace.size(); ++k) {
        const double t = k * dt;
        if (t <= eta.T) continue;
        const double weighted = eta(t) * diag.norm_trace[k];
        if (prev >= 0.0) CHECK(weighted <= prev * (1.0 + 1e-9) + 1e-300);
        prev = weighted;
    }
}

TEST_CASE("convergence guard passes with absorption and a long window") {
    const double h = 0.125;
    const GridSpec g = grid1d(512, 16.0);
    const Submanifold gamma = Submanifold::make_point({0.0});
    const GridField Sh =
        assemble_source(gamma, make_amplitude("constant", 1.0, 0.6), make_gaussian_profile(1), h, g);
    EnergyTrack track;
    track.h = h;
    PotentialPair pots;
    SpongeSpec sponge;
    // the integrand decays like e^{-t Im Etilde}, so the 1e-6 guard needs
    // T + tau0 ~ 14 here
    CutoffFunction eta{13.5, 1.0};
    PartialSolutionDiag diag;
    partial_solution(Sh, track, eta, h / 4.4, pots, sponge, &diag);
    CHECK(diag.integrand_max > 0.0);
    CHECK(diag.convergence_guard_ok);
    CHECK(!diag.divergence_warning);

    // a short window leaves an undecayed tail and raises the warning flag
    CutoffFunction short_eta{2.0, 1.0};
    PartialSolutionDiag short_diag;
    partial_solution(Sh, track, short_eta, h / 4.4, pots, sponge, &short_diag);
    CHECK(short_diag.divergence_warning);
}

TEST_CASE("stability guard rejects oversized steps") {
    const double h = 0.125;
    const GridSpec g = grid1d(256, 8.0);
    PotentialPair pots;
    pots.V1.terms.push_back({PotentialTerm::Kind::gaussian, 1.0, {0.0}, 1.0, 1.0});
    CHECK_THROWS_AS(Propagator(g, h, 1.0, pots, no_sponge(), 1.1), Error);
}

TEST_CASE("energy track window gate") {
    EnergyTrack bad;
    bad.sigma1 = 0.9; // ((1.9/2))^2 * 1.1 = 0.99 >= 0.9
    CHECK_THROWS_AS(bad.validate(), Error);
    EnergyTrack good;
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("cutoff function shape") {
    CutoffFunction eta{4.0, 0.5};
    CHECK(eta(-3.0) == 1.0);
    CHECK(eta(4.0) == 1.0);
    CHECK(eta(4.5) == 0.0);
    CHECK(eta(10.0) == 0.0);
    double prev = 1.0;
    for (double t = 3.9; t <= 4.6; t += 0.01) {
        const double v = eta(t);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("observables near the sponge are rejected") {
    const double h = 0.25;
    const GridSpec g = grid1d(256, 16.0);
    GridField u = gaussian_packet(g, h, 0.0, 0.5, 1.0);
    SpongeSpec sponge;
    SymbolParams p;
    p.kind = "xbump";
    p.x_center = {7.0}; // inside the outer 15% band (starts at 6.8)
    p.x_radius = 0.5;
    const Symbol bad = make_symbol(1, "bad", p);
    CHECK_THROWS_AS(solve_observables(u, {bad}, sponge), Error);

    p.x_center = {0.0};
    p.x_radius = 1.0;
    const Symbol good = make_symbol(1, "good", p);
    const auto rows = solve_observables(u, {good}, sponge);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].value.real() > 0.0);
}
