#include "doctest.h"

#include <cmath>
#include <random>

#include "semilab/geometry.hpp"

using namespace semilab;

namespace {

Submanifold x1_axis(double half_len = 10.0) {
    return Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-half_len}, {half_len}});
}

double bundle_mass(const std::vector<NormalEnergyPoint>& pts) {
    double m = 0.0;
    for (const auto& p : pts) m += p.weight;
    return m;
}

} // namespace

TEST_CASE("tangent projection on coordinate hyperplane") {
    const Submanifold gamma = x1_axis();
    const Vec u = {1.0};
    const TangentSplit s = tangent_projection(gamma, u, Vec{3.0, 4.0});
    CHECK(s.tangential[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.tangential[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.normal[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.normal[1] == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("tangent projection on the unit circle") {
    const Submanifold gamma = Submanifold::make_circle(1.0, {0.0, 0.0});
    const Vec u = {0.0}; // z = (1, 0), tangent (0, 1)
    const TangentSplit s = tangent_projection(gamma, u, Vec{2.0, 3.0});
    CHECK(std::abs(s.tangential[0]) < 1e-12);
    CHECK(s.tangential[1] == doctest::Approx(3.0));
    CHECK(s.normal[0] == doctest::Approx(2.0));
    CHECK(std::abs(s.normal[1]) < 1e-12);
}

TEST_CASE("tangent projection: Pythagoras and idempotence") {
    const Submanifold circle = Submanifold::make_circle(2.0, {0.5, -0.25});
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec u = {dist(rng)};
        const Vec xi = {dist(rng), dist(rng)};
        const TangentSplit s = tangent_projection(circle, u, xi);
        CHECK(std::abs(dot(s.tangential, s.normal)) < 1e-12);
        const double lhs = sq(norm2(s.tangential)) + sq(norm2(s.normal));
        CHECK(lhs == doctest::Approx(sq(norm2(xi))).epsilon(1e-12));
        Vec sum = add(s.tangential, s.normal);
        for (int i = 0; i < 2; ++i) CHECK(sum[i] == doctest::Approx(xi[i]).epsilon(1e-13));
        // idempotence
        const TangentSplit s2 = tangent_projection(circle, u, s.tangential);
        CHECK(norm2(s2.normal) < 1e-12);
        CHECK(norm2(sub(s2.tangential, s.tangential)) < 1e-12);
    }
}

TEST_CASE("second fundamental form vanishes on affine manifolds") {
    const Submanifold gamma = x1_axis();
    const Vec u = {0.3};
    const Vec II = second_fundamental_form(gamma, u, Vec{2.0, 0.0}, Vec{-1.0, 0.0});
    CHECK(norm2(II) < 1e-14);
}

TEST_CASE("second fundamental form of the unit circle") {
    // Oracle: finite difference of the curve second derivative z(t) = (cos t, sin t)
    // at t = 0, which is -(1, 0).
    const double dt = 1e-5;
    const Vec oracle = {(std::cos(dt) - 2.0 + std::cos(-dt)) / (dt * dt),
                        (std::sin(dt) - 2.0 * 0.0 + std::sin(-dt)) / (dt * dt)};
    CHECK(oracle[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(oracle[1]) < 1e-6);

    const Submanifold gamma = Submanifold::make_circle(1.0, {0.0, 0.0});
    const Vec u = {0.0};
    const Vec II = second_fundamental_form(gamma, u, Vec{0.0, 1.0}, Vec{0.0, 1.0});
    CHECK(II[0] == doctest::Approx(oracle[0]).epsilon(1e-6));
    CHECK(std::abs(II[1]) < 1e-10);
    CHECK(norm2(II) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sphere curvature matches the extended-field oracle") {
    const double r = 2.5;
    const Submanifold gamma = Submanifold::make_sphere(r, {0.0, 0.0, 0.0});
    const Vec u = {1.1, 0.7};
    const Vec z = gamma.chart_point(u);

    // Tangent fields extended off the sphere: project constants onto the
    // tangent space of the concentric sphere through w.
    auto extend = [&](const Vec& e, const Vec& w) {
        Vec nu = w;
        scale(1.0 / norm2(w), nu);
        Vec v = e;
        axpy(-dot(e, nu), nu, v);
        return v;
    };
    const Vec e1 = {1.0, 0.0, 0.0};
    const Vec X = extend(e1, z);
    const Vec Xhat = scaled(1.0 / norm2(X), X);

    // Oracle: normal projection of the directional derivative of the extended
    // field Y = X along X, by central differences in the ambient space.
    const double t = 1e-6;
    Vec zp = z, zm = z;
    axpy(t, Xhat, zp);
    axpy(-t, Xhat, zm);
    // normal projection of the derivative is |X| * II(Xhat, Xhat)
    Vec dY = sub(extend(e1, zp), extend(e1, zm));
    scale(1.0 / (2.0 * t * norm2(X)), dY);
    Vec nu = z;
    scale(1.0 / norm2(z), nu);
    const Vec oracle = scaled(dot(dY, nu), nu);

    const Vec II = second_fundamental_form(gamma, u, Xhat, Xhat);
    CHECK(norm2(sub(II, oracle)) < 1e-5);
    CHECK(norm2(II) == doctest::Approx(1.0 / r).epsilon(1e-6));
    CHECK(second_fundamental_norm(gamma, u) == doctest::Approx(1.0 / r).epsilon(1e-5));
}

TEST_CASE("second fundamental form is symmetric and bilinear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const Submanifold sphere = Submanifold::make_sphere(1.7, {0.2, 0.0, -0.1});
    const Submanifold circle = Submanifold::make_circle(0.8, {0.0, 0.0});
    for (int trial = 0; trial < 50; ++trial) {
        {
            const Vec u = {0.4 + 0.3 * dist(rng), 1.0 + 0.5 * dist(rng)};
            const SmallMat J = sphere.jacobian(u);
            Vec X(3, 0.0), Y(3, 0.0);
            const double a1 = dist(rng), a2 = dist(rng), b1 = dist(rng), b2 = dist(rng);
            for (int i = 0; i < 3; ++i) {
                X[i] = a1 * J(i, 0) + a2 * J(i, 1);
                Y[i] = b1 * J(i, 0) + b2 * J(i, 1);
            }
            const Vec xy = second_fundamental_form(sphere, u, X, Y);
            const Vec yx = second_fundamental_form(sphere, u, Y, X);
            CHECK(norm2(sub(xy, yx)) < 1e-8);
            // bilinearity in the first slot
            const Vec x2 = scaled(2.5, X);
            const Vec scaled_val = second_fundamental_form(sphere, u, x2, Y);
            CHECK(norm2(sub(scaled_val, scaled(2.5, xy))) < 1e-8);
        }
        {
            const Vec u = {dist(rng) * 3.0};
            const SmallMat J = circle.jacobian(u);
            Vec X = {J(0, 0), J(1, 0)}, Y = {0.5 * J(0, 0), 0.5 * J(1, 0)};
            const Vec xy = second_fundamental_form(circle, u, X, Y);
            const Vec yx = second_fundamental_form(circle, u, Y, X);
            CHECK(norm2(sub(xy, yx)) < 1e-8);
        }
    }
}

TEST_CASE("non-tangent arguments are rejected") {
    const Submanifold gamma = x1_axis();
    CHECK_THROWS_AS(second_fundamental_form(gamma, Vec{0.0}, Vec{1.0, 0.5}, Vec{1.0, 0.0}), Error);
}

TEST_CASE("bundle mass: point source in R^2 gives the circle 2 pi r") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
    ScalarField v1; // zero
    const BundleBudget budget{8, 32, 1e-5};
    const auto pts = sample_energy_normal_bundle(gamma, v1, 1.0, budget, 1);
    CHECK(bundle_mass(pts) == doctest::Approx(2.0 * M_PI).epsilon(1e-8));

    // fiber radius scales as sqrt(E0): mass = 2 pi sqrt(E0)
    const auto pts2 = sample_energy_normal_bundle(gamma, v1, 2.25, budget, 1);
    CHECK(bundle_mass(pts2) == doctest::Approx(2.0 * M_PI * 1.5).epsilon(1e-8));
}

TEST_CASE("bundle mass: segment in R^2 gives two sheets of length L") {
    const double L = 3.0;
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{0.0}, {L}});
    ScalarField v1;
    const auto pts = sample_energy_normal_bundle(gamma, v1, 1.0, BundleBudget{16, 8, 1e-5}, 1);
    CHECK(bundle_mass(pts) == doctest::Approx(2.0 * L).epsilon(1e-8));
}

TEST_CASE("bundle mass: point source in R^3 gives the sphere area") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0, 0.0});
    ScalarField v1;
    v1.terms.push_back({PotentialTerm::Kind::constant, 0.5, {}, 1.0, 1.0});
    const double E0 = 2.0; // fiber radius sqrt(1.5)
    const auto pts = sample_energy_normal_bundle(gamma, v1, E0, BundleBudget{8, 512, 1e-5}, 1);
    CHECK(bundle_mass(pts) == doctest::Approx(4.0 * M_PI * 1.5).epsilon(1e-8));
}

TEST_CASE("bundle mass: circle base with varying V1 keeps the arc-length measure") {
    // For n = 2, d = 1 the perp space is trivial, so the fiber-radius variation
    // does not enter the induced measure: mass = 2 * circumference.
    const double rho = 1.25;
    const Submanifold gamma = Submanifold::make_circle(rho, {0.0, 0.0});
    ScalarField v1;
    v1.terms.push_back({PotentialTerm::Kind::gaussian, 0.4, {0.3, 0.0}, 1.0, 1.0});
    const auto pts = sample_energy_normal_bundle(gamma, v1, 1.0, BundleBudget{64, 8, 1e-5}, 1);
    CHECK(bundle_mass(pts) == doctest::Approx(4.0 * M_PI * rho).epsilon(1e-7));
}

TEST_CASE("bundle points satisfy the fiber constraints exhaustively") {
    const Submanifold gamma = Submanifold::make_circle(2.0, {0.1, -0.3});
    ScalarField v1;
    v1.terms.push_back({PotentialTerm::Kind::gaussian, -0.3, {0.0, 0.0}, 2.0, 1.0});
    const double E0 = 1.3;
    const auto pts = sample_energy_normal_bundle(gamma, v1, E0, BundleBudget{24, 8, 1e-5}, 3);
    REQUIRE(!pts.empty());
    for (const auto& p : pts) {
        const double energy = sq(norm2(p.xi)) + v1.value(p.z);
        CHECK(std::abs(energy - E0) <= 1e-10 * std::abs(E0));
        const TangentSplit s = tangent_projection(gamma, p.u, p.xi);
        CHECK(norm2(s.tangential) <= 1e-10 * norm2(p.xi));
        CHECK(p.weight >= 0.0);
    }
}

TEST_CASE("empty fiber raises") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
    ScalarField v1;
    v1.terms.push_back({PotentialTerm::Kind::constant, 2.0, {}, 1.0, 1.0});
    CHECK_THROWS_AS(sample_energy_normal_bundle(gamma, v1, 1.0, BundleBudget{4, 8, 1e-5}, 1), Error);
}

TEST_CASE("bundle quadrature converges when the mesh is refined") {
    // general chart: a sine-perturbed line in R^2 (smooth, non-flat)
    auto chart = [](std::span<const double> u, std::span<double> z) {
        z[0] = u[0];
        z[1] = 0.2 * std::sin(u[0]);
    };
    const Submanifold gamma = Submanifold::make_general(2, 1, Box{{0.0}, {2.0}}, chart);
    ScalarField v1;
    // analytic arc length of (t, 0.2 sin t) over [0, 2]
    double exact = 0.0;
    {
        const int K = 200000;
        const double dt = 2.0 / K;
        for (int i = 0; i < K; ++i) {
            const double t = (i + 0.5) * dt;
            exact += std::sqrt(1.0 + sq(0.2 * std::cos(t))) * dt;
        }
    }
    const double mass_exact = 2.0 * exact;
    double prev_err = 0.0;
    double worst_ratio = 1e300;
    for (int nodes : {2, 4, 8}) {
        const auto pts = sample_energy_normal_bundle(gamma, v1, 1.0, BundleBudget{nodes, 8, 1e-5}, 1);
        const double err = std::abs(bundle_mass(pts) - mass_exact);
        if (prev_err > 0.0 && err > 0.0) worst_ratio = std::min(worst_ratio, prev_err / err);
        prev_err = err;
    }
    CHECK(worst_ratio >= 3.0);
}

TEST_CASE("non-incoming check: affine line passes, circle fails, bounded is vacuous") {
    const NonIncomingReport line = check_nonincoming(x1_axis(), 1.0, 0.3, BundleBudget{32, 16, 1e-5});
    CHECK(line.pass);

    const Submanifold circle = Submanifold::make_circle(2.0, {0.0, 0.0});
    const NonIncomingReport bad = check_nonincoming(circle, 1.0, 0.5, BundleBudget{32, 2, 1e-5});
    CHECK(!bad.pass);
    REQUIRE(!bad.witnesses.empty());
    // witness: inward normal at |z| = 2
    const auto& w = bad.witnesses.front();
    CHECK(dot(w.z, w.xi) <= -0.5 * norm2(w.z) * norm2(w.xi) + 1e-12);

    const NonIncomingReport vac = check_nonincoming(circle, 5.0, 0.5, BundleBudget{16, 2, 1e-5});
    CHECK(vac.pass);
}
