#include "doctest.h"

#include <cmath>

#include "semilab/source.hpp"

using namespace semilab;

namespace {

GridSpec small_grid(int n, double half, double dx) {
    GridSpec g;
    g.n = n;
    const int N = static_cast<int>(std::round(2.0 * half / dx));
    g.dims.assign(n, N);
    g.spacing.assign(n, dx);
    g.origin.assign(n, -half);
    return g;
}

} // namespace

TEST_CASE("point source is the scaled profile, pointwise") {
    const int n = 2;
    const Submanifold gamma = Submanifold::make_point({0.25, -0.5});
    const Amplitude A = make_amplitude("constant", 1.7, 0.6);
    const Profile S = make_gaussian_profile(n);
    const double h = 0.25;
    const GridSpec grid = small_grid(n, 4.0, h / 4.0);
    const GridField field = assemble_source(gamma, A, S, h, grid);

    std::vector<int> idx;
    const double pre = std::pow(h, 0.5 * (1.0 - n));
    for (std::size_t f = 0; f < field.data.size(); f += 317) {
        unflatten(grid, f, idx);
        Vec y(n);
        for (int a = 0; a < n; ++a) y[a] = (grid.coord(a, idx[a]) - gamma.chart_point({})[a]) / h;
        const double expect = norm2(y) <= S.support_radius ? pre * 1.7 * S.value(y) : 0.0;
        CHECK(field.data[f].real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(field.data[f].imag() == 0.0);
    }
}

TEST_CASE("zero amplitude gives the zero field") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
    const Amplitude A = make_amplitude("zero", 0.0, 0.6);
    const GridField field =
        assemble_source(gamma, A, make_gaussian_profile(2), 0.25, small_grid(2, 2.0, 0.0625));
    CHECK(max_abs(field) == 0.0);
}

TEST_CASE("segment ridge cross-sections match the erf convolution oracle") {
    // Gamma = [-L, L] x {0}, A = 1, S gaussian. The x2-integral of S_h at fixed
    // x1 has the closed form sqrt(2 pi) * conv(x1) with
    // conv(x1) = h sqrt(pi/2) (erf((x1+L)/(sqrt2 h)) - erf((x1-L)/(sqrt2 h))).
    const double L = 1.0, h = 0.125;
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-L}, {L}});
    const Amplitude A = make_amplitude("constant", 1.0, 0.6);
    const Profile S = make_gaussian_profile(2);
    const GridSpec grid = small_grid(2, 3.0, h / 4.0);
    const GridField field = assemble_source(gamma, A, S, h, grid);

    const double pre = std::pow(h, 0.5 * (1.0 - 2.0 - 1.0)); // h^{-1}
    for (double x1 : {0.0, 0.5, 0.9, 1.1, 1.5}) {
        const int i1 = static_cast<int>(std::round((x1 - grid.origin[0]) / grid.spacing[0]));
        Kahan cross;
        for (int i2 = 0; i2 < grid.dims[1]; ++i2)
            cross.add(field.data[static_cast<std::size_t>(i1) * grid.dims[1] + i2].real());
        const double numeric = cross.sum * grid.spacing[1];
        const double xg = grid.coord(0, i1);
        const double conv = h * std::sqrt(M_PI / 2.0) *
                            (std::erf((xg + L) / (std::sqrt(2.0) * h)) -
                             std::erf((xg - L) / (std::sqrt(2.0) * h)));
        const double oracle = pre * std::sqrt(2.0 * M_PI) * h * conv; // pre = 1/h
        CHECK(numeric == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("assembly is linear in the amplitude") {
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-1.0}, {1.0}});
    const Profile S = make_gaussian_profile(2);
    const double h = 0.25;
    const GridSpec grid = small_grid(2, 2.5, h / 4.0);

    const Amplitude A = make_amplitude("constant", 1.0, 0.6);
    const Amplitude B = make_amplitude("gaussian", 0.7, 0.6);
    Amplitude combo;
    combo.delta = 0.6;
    const double alpha = 0.3, beta = -1.2;
    combo.value = [&, alpha, beta](std::span<const double> u) {
        return alpha * A.value(u) + beta * B.value(u);
    };
    combo.derivative = A.derivative;

    const GridField fa = assemble_source(gamma, A, S, h, grid);
    const GridField fb = assemble_source(gamma, B, S, h, grid);
    const GridField fc = assemble_source(gamma, combo, S, h, grid);
    double worst = 0.0;
    for (std::size_t f = 0; f < fc.data.size(); ++f)
        worst = std::max(worst,
                         std::abs(fc.data[f].real() - alpha * fa.data[f].real() - beta * fb.data[f].real()));
    CHECK(worst < 1e-12 * std::max(1.0, max_abs(fc)));
}

TEST_CASE("compact profile keeps the field local") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
    const Amplitude A = make_amplitude("constant", 1.0, 0.6);
    const Profile S = make_bump_profile(2, 1.0);
    const double h = 0.25;
    const GridSpec grid = small_grid(2, 2.0, h / 4.0);
    const GridField field = assemble_source(gamma, A, S, h, grid);
    std::vector<int> idx;
    for (std::size_t f = 0; f < field.data.size(); ++f) {
        unflatten(grid, f, idx);
        double r2 = 0.0;
        for (int a = 0; a < 2; ++a) r2 += sq(grid.coord(a, idx[a]));
        if (std::sqrt(r2) > h * S.support_radius + 2.0 * grid.spacing[0])
            CHECK(field.data[f] == Complex(0.0, 0.0));
    }
}

TEST_CASE("profile transforms match direct quadrature of the Fourier integral") {
    for (int n : {1, 2}) {
        for (const Profile& S : {make_gaussian_profile(n), make_bump_profile(n, 1.3)}) {
            const double half = S.support_radius + 1.0;
            const double dx = 0.02;
            const GridSpec grid = small_grid(n, half, dx);
            for (double knorm : {0.3, 1.0, 1.7}) {
                Vec xi(n, 0.0);
                xi[0] = knorm;
                // direct Riemann quadrature of int e^{-i x xi} S(x) dx (real part;
                // S is even so the transform is real)
                Kahan acc;
                std::vector<int> idx;
                Vec x(n);
                for (std::size_t f = 0; f < grid.size(); ++f) {
                    unflatten(grid, f, idx);
                    for (int a = 0; a < n; ++a) x[a] = grid.coord(a, idx[a]);
                    acc.add(S.value(x) * std::cos(dot(x, xi)));
                }
                double cell = 1.0;
                for (int a = 0; a < n; ++a) cell *= grid.spacing[a];
                const double direct = acc.sum * cell;
                CHECK(S.fourier(xi) == doctest::Approx(direct).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("truncated amplitude: plateau, support, and bound") {
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-10.0}, {10.0}});
    const Amplitude A = make_amplitude("inverse_poly", 1.0, 0.6);
    const double R = 2.0;
    const Amplitude AR = truncate_amplitude(gamma, A, R);
    for (double u : {-9.5, -5.0, -2.5, -1.0, 0.0, 0.7, 1.999, 2.5, 3.2, 4.0, 5.5, 9.0}) {
        const Vec uu = {u};
        const double a = A.value(uu), ar = AR.value(uu);
        if (std::abs(u) <= R) CHECK(ar == a);
        if (std::abs(u) >= 2.0 * R) CHECK(ar == 0.0);
        CHECK(std::abs(ar) <= std::abs(a) + 1e-15);
    }
}

TEST_CASE("truncation leaves the field unchanged near the origin") {
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-4.0}, {4.0}});
    const Amplitude A = make_amplitude("constant", 1.0, 0.6);
    const Profile S = make_bump_profile(2, 1.0);
    const double h = 0.25, R = 2.0;
    const GridSpec grid = small_grid(2, 4.0, h / 4.0);
    const GridField full = assemble_source(gamma, A, S, h, grid);
    const GridField trunc = assemble_source(gamma, truncate_amplitude(gamma, A, R), S, h, grid);
    const double guard = R - 2.0 * h * S.support_radius;
    std::vector<int> idx;
    for (std::size_t f = 0; f < full.data.size(); ++f) {
        unflatten(grid, f, idx);
        double r2 = 0.0;
        for (int a = 0; a < 2; ++a) r2 += sq(grid.coord(a, idx[a]));
        if (std::sqrt(r2) < guard)
            CHECK(std::abs(full.data[f].real() - trunc.data[f].real()) == 0.0);
    }
}

TEST_CASE("weighted norm basics") {
    GridField zero(small_grid(2, 2.0, 0.125), 0.5);
    CHECK(weighted_norm(zero, 0.7) == 0.0);

    // gaussian closed form: || e^{-|x|^2/2} ||_{L^2(R^2)} = sqrt(pi)
    GridField gauss(small_grid(2, 8.0, 0.125), 0.5);
    std::vector<int> idx;
    for (std::size_t f = 0; f < gauss.data.size(); ++f) {
        unflatten(gauss.spec, f, idx);
        double r2 = 0.0;
        for (int a = 0; a < 2; ++a) r2 += sq(gauss.spec.coord(a, idx[a]));
        gauss.data[f] = std::exp(-0.5 * r2);
    }
    CHECK(weighted_norm(gauss, 0.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));

    // homogeneity
    GridField scaled_field = gauss;
    for (auto& v : scaled_field.data) v *= Complex(0.0, -2.5);
    CHECK(weighted_norm(scaled_field, 0.9) ==
          doctest::Approx(2.5 * weighted_norm(gauss, 0.9)).epsilon(1e-12));
}

TEST_CASE("source norm scaling: point and segment exponents near 1/2") {
    const std::vector<double> h_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    {
        const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
        const NormScaling fit = source_norm_scaling(gamma, make_amplitude("constant", 1.0, 0.6),
                                                    make_gaussian_profile(2), h_list, 1.6);
        CHECK(!fit.skipped);
        CHECK(fit.exponent > 0.45);
        CHECK(fit.exponent < 0.55);
    }
    {
        const Submanifold gamma =
            Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-1.0}, {1.0}});
        const NormScaling fit = source_norm_scaling(gamma, make_amplitude("constant", 1.0, 0.6),
                                                    make_gaussian_profile(2), h_list, 2.6);
        CHECK(!fit.skipped);
        CHECK(fit.exponent > 0.45);
        CHECK(fit.exponent < 0.55);
    }
    {
        const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
        const NormScaling fit = source_norm_scaling(gamma, make_amplitude("zero", 0.0, 0.6),
                                                    make_gaussian_profile(2), h_list, 1.6);
        CHECK(fit.skipped);
    }
}

TEST_CASE("non-geometric h list is rejected") {
    const Submanifold gamma = Submanifold::make_point({0.0, 0.0});
    CHECK_THROWS_AS(source_norm_scaling(gamma, make_amplitude("constant", 1.0, 0.6),
                                        make_gaussian_profile(2), {0.5, 0.25, 0.2, 0.1}, 1.0),
                    Error);
}

TEST_CASE("amplitude decay report stays finite for decaying amplitudes") {
    const Submanifold gamma =
        Submanifold::make_affine({0.0, 0.0}, {{1.0, 0.0}}, Box{{-30.0}, {30.0}});
    const AmplitudeDecayReport rep =
        check_amplitude_decay(gamma, make_amplitude("inverse_poly", 1.0, 0.6), 64, 17);
    CHECK(rep.finite);
    CHECK(rep.integral > 0.0);
    CHECK(rep.local_fit_c > 0.0);
}
