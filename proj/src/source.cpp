#include "semilab/source.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "semilab/quadrature.hpp"
#include "semilab/symbols.hpp"

namespace semilab {

Amplitude make_amplitude(const std::string& kind, double param1, double delta) {
    Amplitude A;
    A.kind = kind;
    A.delta = delta;
    if (kind == "constant") {
        A.value = [param1](std::span<const double>) { return param1; };
        A.derivative = [](std::span<const double>, std::span<double> du) {
            for (double& v : du) v = 0.0;
        };
        return A;
    }
    if (kind == "gaussian") {
        A.value = [param1](std::span<const double> u) {
            return std::exp(-dot(u, u) / sq(param1));
        };
        A.derivative = [param1](std::span<const double> u, std::span<double> du) {
            const double f = -2.0 / sq(param1) * std::exp(-dot(u, u) / sq(param1));
            for (std::size_t i = 0; i < u.size(); ++i) du[i] = f * u[i];
        };
        return A;
    }
    if (kind == "inverse_poly") {
        A.value = [param1](std::span<const double> u) {
            return std::pow(1.0 + dot(u, u), -param1);
        };
        A.derivative = [param1](std::span<const double> u, std::span<double> du) {
            const double f = -param1 * std::pow(1.0 + dot(u, u), -param1 - 1.0) * 2.0;
            for (std::size_t i = 0; i < u.size(); ++i) du[i] = f * u[i];
        };
        return A;
    }
    if (kind == "zero") {
        A.value = [](std::span<const double>) { return 0.0; };
        A.derivative = [](std::span<const double>, std::span<double> du) {
            for (double& v : du) v = 0.0;
        };
        return A;
    }
    fail(ErrorKind::parse, "unknown amplitude kind: " + kind);
}

Profile make_gaussian_profile(int n) {
    Profile p;
    p.kind = "gaussian";
    p.dim = n;
    p.value = [](std::span<const double> x) { return std::exp(-0.5 * dot(x, x)); };
    p.fourier = [n](std::span<const double> xi) {
        return std::pow(2.0 * M_PI, 0.5 * n) * std::exp(-0.5 * dot(xi, xi));
    };
    p.support_radius = 9.5; // exp(-r^2/2) < 1e-19 beyond
    return p;
}

Profile make_bump_profile(int n, double radius) {
    Profile p;
    p.kind = "bump";
    p.dim = n;
    p.support_radius = radius;
    p.value = [radius](std::span<const double> x) { return bump_profile(norm2(x) / radius); };
    // radial Fourier transform by fixed quadrature (smooth compact integrand)
    const Quad1d rule = gauss_legendre(240, 0.0, radius);
    if (n == 1) {
        p.fourier = [rule, radius](std::span<const double> xi) {
            const double k = std::abs(xi[0]);
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                s += rule.weights[i] * bump_profile(rule.nodes[i] / radius) *
                     std::cos(k * rule.nodes[i]);
            return 2.0 * s;
        };
    } else if (n == 2) {
        p.fourier = [rule, radius](std::span<const double> xi) {
            const double k = norm2(xi);
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                s += rule.weights[i] * bump_profile(rule.nodes[i] / radius) *
                     std::cyl_bessel_j(0.0, k * rule.nodes[i]) * rule.nodes[i];
            return 2.0 * M_PI * s;
        };
    } else {
        fail(ErrorKind::unsupported_symbol, "bump profile transform implemented for n <= 2");
    }
    return p;
}

namespace {

// Adds c * S((x - z)/h) over the grid points within the scaled support window.
void splat_profile(GridField& field, const Profile& S, const Vec& z, double h, double c) {
    const GridSpec& g = field.spec;
    const int n = g.n;
    const double rad = S.support_radius * h;
    std::vector<int> lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::floor((z[a] - rad - g.origin[a]) / g.spacing[a])) - 1);
        hi[a] = std::min(g.dims[a] - 1,
                         static_cast<int>(std::ceil((z[a] + rad - g.origin[a]) / g.spacing[a])) + 1);
        if (lo[a] > hi[a]) return;
    }
    std::vector<int> idx(lo);
    Vec y(n);
    while (true) {
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * g.dims[a] + idx[a];
        for (int a = 0; a < n; ++a) y[a] = (g.coord(a, idx[a]) - z[a]) / h;
        field.data[flat] += c * S.value(y);
        int a = n - 1;
        while (a >= 0 && ++idx[a] > hi[a]) idx[a--] = lo[a];
        if (a < 0) break;
    }
}

} // namespace

GridField assemble_source(const Submanifold& gamma, const Amplitude& A, const Profile& S, double h,
                          const GridSpec& grid) {
    check_resolves(grid, h);
    const int n = gamma.ambient_dim();
    const int d = gamma.manifold_dim();
    require(grid.n == n, ErrorKind::precondition, "assemble_source: grid dimension mismatch");
    GridField field(grid, h);
    const double prefactor = std::pow(h, 0.5 * (1.0 - n - d));

    if (d == 0) {
        const Vec z0 = gamma.chart_point({});
        splat_profile(field, S, z0, h, prefactor * A.value({}));
        return field;
    }

    // Composite Gauss-Legendre along the chart, resolving the profile scale h:
    // at least 6 nodes per arc length h on every axis.
    const Box& dom = gamma.chart_domain();
    Vec u_mid(d);
    for (int a = 0; a < d; ++a) u_mid[a] = 0.5 * (dom.lo[a] + dom.hi[a]);
    const double density = std::max(gamma.chart_density(u_mid), 1e-8);
    constexpr int order = 6;
    std::vector<Quad1d> rules;
    for (int a = 0; a < d; ++a) {
        const double arc = (dom.hi[a] - dom.lo[a]) * density * 1.25;
        const int panels = std::max(1, static_cast<int>(std::ceil(arc / h)));
        rules.push_back(composite_gauss_legendre(order, panels, dom.lo[a], dom.hi[a]));
    }

    std::vector<std::size_t> idx(d, 0);
    Vec u(d);
    while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            u[a] = rules[a].nodes[idx[a]];
            w *= rules[a].weights[idx[a]];
        }
        const double amp = A.value(u);
        if (amp != 0.0) {
            const Vec z = gamma.chart_point(u);
            splat_profile(field, S, z, h, prefactor * amp * w * gamma.chart_density(u));
        }
        int a = d - 1;
        while (a >= 0 && ++idx[a] == rules[a].nodes.size()) idx[a--] = 0;
        if (a < 0) break;
    }
    return field;
}

Amplitude truncate_amplitude(const Submanifold& gamma, const Amplitude& A, double R) {
    require(R > 0.0, ErrorKind::precondition, "truncate_amplitude: R must be positive");
    Amplitude out;
    out.kind = A.kind + "_truncated";
    out.delta = A.delta;
    const Submanifold* g = &gamma;
    auto base_value = A.value;
    out.value = [g, base_value, R](std::span<const double> u) {
        const double v = base_value(u);
        if (v == 0.0) return 0.0;
        return v * plateau_theta(norm2(g->chart_point(u)) / R);
    };
    auto base_deriv = A.derivative;
    out.derivative = [g, base_value, base_deriv, R](std::span<const double> u, std::span<double> du) {
        // product rule; the plateau factor is differentiated through the chart
        base_deriv(u, du);
        const Vec z = g->chart_point(u);
        const double s = norm2(z) / R;
        const double theta = plateau_theta(s);
        for (double& v : du) v *= theta;
        if (s > 1.0 && s < 2.0) {
            const double t = s - 1.0;
            const double dsmooth = t * t * (30.0 + t * (-60.0 + 30.0 * t)); // d/dt quintic step
            const double dtheta = -dsmooth / R;                             // d theta / d|z|
            const double a0 = base_value(u);
            const SmallMat J = g->jacobian(u);
            const double zn = norm2(z);
            for (int c = 0; c < g->manifold_dim(); ++c) {
                double dz = 0.0;
                for (int i = 0; i < g->ambient_dim(); ++i) dz += z[i] * J(i, c);
                du[c] += a0 * dtheta * dz / zn;
            }
        }
    };
    return out;
}

double weighted_norm(const GridField& u, double delta) {
    const GridSpec& g = u.spec;
    double cell = 1.0;
    for (int a = 0; a < g.n; ++a) cell *= g.spacing[a];
    Kahan acc;
    std::vector<int> idx;
    for (std::size_t f = 0; f < u.data.size(); ++f) {
        const double a2 = std::norm(u.data[f]);
        if (a2 == 0.0) continue;
        unflatten(g, f, idx);
        double x2 = 0.0;
        for (int a = 0; a < g.n; ++a) x2 += sq(g.coord(a, idx[a]));
        acc.add(std::pow(1.0 + x2, delta) * a2);
    }
    return std::sqrt(acc.sum * cell);
}

NormScaling source_norm_scaling(const Submanifold& gamma, const Amplitude& A, const Profile& S,
                                const std::vector<double>& h_list, double box_halfwidth) {
    require(h_list.size() >= 4, ErrorKind::precondition, "source_norm_scaling: need >= 4 h values");
    const double ratio = h_list[1] / h_list[0];
    for (std::size_t i = 1; i + 1 < h_list.size(); ++i)
        require(std::abs(h_list[i + 1] / h_list[i] - ratio) < 1e-9 * std::abs(ratio),
                ErrorKind::precondition, "source_norm_scaling: h_list must be geometric");

    NormScaling out;
    for (double h : h_list) {
        const GridSpec grid = GridSpec::centered(gamma.ambient_dim(), box_halfwidth, h, 4);
        const GridField sh = assemble_source(gamma, A, S, h, grid);
        out.norms.push_back(weighted_norm(sh, A.delta));
    }
    double max_norm = 0.0;
    for (double v : out.norms) max_norm = std::max(max_norm, v);
    if (max_norm < 1e-250) {
        out.skipped = true;
        out.summary = "all norms vanish; scaling fit skipped";
        return out;
    }
    // least-squares slope of log ||S_h|| against log h
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(h_list.size());
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        const double lx = std::log(h_list[i]);
        const double ly = std::log(out.norms[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    out.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    std::ostringstream os;
    os << "||S_h|| scaling exponent = " << out.exponent << " over " << h_list.size() << " h values";
    out.summary = os.str();
    return out;
}

AmplitudeDecayReport check_amplitude_decay(const Submanifold& gamma, const Amplitude& A,
                                           int chart_nodes_per_dim, std::uint64_t seed) {
    AmplitudeDecayReport rep;
    const int d = gamma.manifold_dim();
    const int n = gamma.ambient_dim();
    Kahan total;

    struct Node {
        Vec u, z;
        double w = 0.0, integrand = 0.0;
    };
    std::vector<Node> nodes;

    auto integrand_at = [&](std::span<const double> u) {
        const double a = std::abs(A.value(u));
        double da_norm = 0.0;
        if (d > 0) {
            Vec du(d, 0.0);
            A.derivative(u, du);
            // cotangent norm: sqrt(grad^T (J^T J)^{-1} grad)
            const SmallMat J = gamma.jacobian(u);
            SmallMat G(d, d);
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i) s += J(i, p) * J(i, q);
                    G(p, q) = s;
                }
            const Vec sol = solve(G, du);
            da_norm = std::sqrt(std::max(0.0, dot(sol, du)));
        }
        const double ii = second_fundamental_norm(gamma, u);
        return a + da_norm + a * ii;
    };

    if (d == 0) {
        const Vec z = gamma.chart_point({});
        const double w = std::pow(1.0 + dot(z, z), 0.5 * A.delta);
        rep.integral = w * integrand_at({});
        nodes.push_back({{}, z, 1.0, rep.integral});
    } else {
        std::vector<Quad1d> rules;
        for (int a = 0; a < d; ++a)
            rules.push_back(gauss_legendre(chart_nodes_per_dim, gamma.chart_domain().lo[a],
                                           gamma.chart_domain().hi[a]));
        std::vector<int> idx(d, 0);
        Vec u(d);
        while (true) {
            double w = 1.0;
            for (int a = 0; a < d; ++a) {
                u[a] = rules[a].nodes[idx[a]];
                w *= rules[a].weights[idx[a]];
            }
            Node node;
            node.u = u;
            node.z = gamma.chart_point(u);
            node.w = w * gamma.chart_density(u);
            node.integrand = std::pow(1.0 + dot(node.z, node.z), 0.5 * A.delta) * integrand_at(u);
            total.add(node.w * node.integrand);
            nodes.push_back(std::move(node));
            int a = d - 1;
            while (a >= 0 && ++idx[a] == chart_nodes_per_dim) idx[a--] = 0;
            if (a < 0) break;
        }
        rep.integral = total.sum;
    }
    rep.finite = std::isfinite(rep.integral);

    // local fit: integral over B(x, r) bounded by c r^d for random (x, r)
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst_c = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
        const double r = 0.05 + 0.95 * unif(rng);
        Vec x(n);
        const Node& anchor = nodes[static_cast<std::size_t>(unif(rng) * (nodes.size() - 1))];
        for (int i = 0; i < n; ++i) x[i] = anchor.z[i] + 0.5 * r * (2.0 * unif(rng) - 1.0);
        double local = 0.0;
        for (const Node& node : nodes) {
            if (norm2(sub(node.z, x)) <= r) local += node.w * node.integrand;
        }
        worst_c = std::max(worst_c, local / std::pow(r, d));
    }
    rep.local_fit_c = worst_c;
    std::ostringstream os;
    os << "amplitude decay: integral = " << rep.integral << ", local fit c = " << rep.local_fit_c
       << (rep.finite ? " (finite)" : " (NOT finite)");
    rep.summary = os.str();
    return rep;
}

} // namespace semilab
