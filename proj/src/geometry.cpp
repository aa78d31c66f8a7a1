#include "semilab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semilab/quadrature.hpp"

namespace semilab {

namespace {

constexpr double kRankTol = 1e-10;

// Orthonormalize the columns already stored in `vecs` (modified in place),
// dropping nothing; throws if a vector degenerates.
void orthonormalize(std::vector<Vec>& vecs) {
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) axpy(-dot(vecs[i], vecs[j]), vecs[j], vecs[i]);
        const double nrm = norm2(vecs[i]);
        require(nrm > kRankTol, ErrorKind::degenerate_chart, "orthonormalize: degenerate frame");
        scale(1.0 / nrm, vecs[i]);
    }
}

std::vector<Vec> tangent_onb(const SmallMat& J) {
    std::vector<Vec> t;
    for (std::size_t c = 0; c < J.cols; ++c) {
        Vec col(J.rows);
        for (std::size_t r = 0; r < J.rows; ++r) col[r] = J(r, c);
        t.push_back(std::move(col));
    }
    orthonormalize(t);
    return t;
}

double surface_area_of_sphere(int m) {
    // |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
    return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

} // namespace

Submanifold Submanifold::make_point(Vec z0) {
    Submanifold g;
    g.n_ = static_cast<int>(z0.size());
    g.d_ = 0;
    g.kind_ = Kind::point;
    g.point_ = std::move(z0);
    return g;
}

Submanifold Submanifold::make_affine(Vec origin, std::vector<Vec> directions, Box domain) {
    Submanifold g;
    g.n_ = static_cast<int>(origin.size());
    g.d_ = static_cast<int>(directions.size());
    require(g.d_ >= 1 && g.d_ <= g.n_ - 1, ErrorKind::precondition, "affine: need 1 <= d <= n-1");
    require(domain.dim() == g.d_, ErrorKind::precondition, "affine: domain dim mismatch");
    orthonormalize(directions);
    g.kind_ = Kind::affine;
    g.origin_ = std::move(origin);
    g.directions_ = std::move(directions);
    g.domain_ = std::move(domain);
    return g;
}

Submanifold Submanifold::make_circle(double radius, Vec center) {
    require(radius > 0.0 && center.size() == 2, ErrorKind::precondition, "circle: bad parameters");
    Submanifold g;
    g.n_ = 2;
    g.d_ = 1;
    g.kind_ = Kind::sphere_like;
    g.origin_ = std::move(center);
    g.radius_ = radius;
    g.domain_ = Box{{0.0}, {2.0 * M_PI}};
    return g;
}

Submanifold Submanifold::make_sphere(double radius, Vec center) {
    require(radius > 0.0 && center.size() == 3, ErrorKind::precondition, "sphere: bad parameters");
    Submanifold g;
    g.n_ = 3;
    g.d_ = 2;
    g.kind_ = Kind::sphere_like;
    g.origin_ = std::move(center);
    g.radius_ = radius;
    g.domain_ = Box{{0.0, 0.0}, {M_PI, 2.0 * M_PI}};
    return g;
}

Submanifold Submanifold::make_general(int ambient_dim, int manifold_dim, Box domain, ChartFn chart) {
    require(manifold_dim >= 1 && manifold_dim <= ambient_dim - 1, ErrorKind::precondition,
            "general chart: need 1 <= d <= n-1");
    require(domain.dim() == manifold_dim, ErrorKind::precondition, "general chart: domain dim mismatch");
    Submanifold g;
    g.n_ = ambient_dim;
    g.d_ = manifold_dim;
    g.kind_ = Kind::general_chart;
    g.domain_ = std::move(domain);
    g.chart_fn_ = std::move(chart);
    return g;
}

void Submanifold::chart(std::span<const double> u, std::span<double> z) const {
    switch (kind_) {
    case Kind::point:
        for (int i = 0; i < n_; ++i) z[i] = point_[i];
        return;
    case Kind::affine:
        for (int i = 0; i < n_; ++i) {
            double s = origin_[i];
            for (int a = 0; a < d_; ++a) s += u[a] * directions_[a][i];
            z[i] = s;
        }
        return;
    case Kind::sphere_like:
        if (n_ == 2) {
            z[0] = origin_[0] + radius_ * std::cos(u[0]);
            z[1] = origin_[1] + radius_ * std::sin(u[0]);
        } else {
            z[0] = origin_[0] + radius_ * std::sin(u[0]) * std::cos(u[1]);
            z[1] = origin_[1] + radius_ * std::sin(u[0]) * std::sin(u[1]);
            z[2] = origin_[2] + radius_ * std::cos(u[0]);
        }
        return;
    case Kind::general_chart:
        chart_fn_(u, z);
        return;
    }
}

Vec Submanifold::chart_point(std::span<const double> u) const {
    Vec z(n_);
    chart(u, z);
    return z;
}

SmallMat Submanifold::jacobian(std::span<const double> u) const {
    SmallMat J(n_, std::max(d_, 0));
    switch (kind_) {
    case Kind::point:
        return J;
    case Kind::affine:
        for (int i = 0; i < n_; ++i)
            for (int a = 0; a < d_; ++a) J(i, a) = directions_[a][i];
        return J;
    case Kind::sphere_like:
        if (n_ == 2) {
            J(0, 0) = -radius_ * std::sin(u[0]);
            J(1, 0) = radius_ * std::cos(u[0]);
        } else {
            const double sp = std::sin(u[0]), cp = std::cos(u[0]);
            const double sl = std::sin(u[1]), cl = std::cos(u[1]);
            J(0, 0) = radius_ * cp * cl;
            J(1, 0) = radius_ * cp * sl;
            J(2, 0) = -radius_ * sp;
            J(0, 1) = -radius_ * sp * sl;
            J(1, 1) = radius_ * sp * cl;
            J(2, 1) = 0.0;
        }
        return J;
    case Kind::general_chart: {
        Vec up(u.begin(), u.end()), um(u.begin(), u.end());
        Vec zp(n_), zm(n_);
        for (int a = 0; a < d_; ++a) {
            const double step = 1e-6 * (1.0 + std::abs(u[a]));
            up[a] = u[a] + step;
            um[a] = u[a] - step;
            chart_fn_(up, zp);
            chart_fn_(um, zm);
            for (int i = 0; i < n_; ++i) J(i, a) = (zp[i] - zm[i]) / (2.0 * step);
            up[a] = u[a];
            um[a] = u[a];
        }
        return J;
    }
    }
    return J;
}

std::vector<Vec> Submanifold::hessian(std::span<const double> u) const {
    std::vector<Vec> H(static_cast<std::size_t>(d_) * d_, Vec(n_, 0.0));
    switch (kind_) {
    case Kind::point:
    case Kind::affine:
        return H; // flat
    case Kind::sphere_like:
        if (n_ == 2) {
            H[0] = {-radius_ * std::cos(u[0]), -radius_ * std::sin(u[0])};
        } else {
            const double sp = std::sin(u[0]), cp = std::cos(u[0]);
            const double sl = std::sin(u[1]), cl = std::cos(u[1]);
            H[0 * d_ + 0] = {-radius_ * sp * cl, -radius_ * sp * sl, -radius_ * cp};
            H[0 * d_ + 1] = {-radius_ * cp * sl, radius_ * cp * cl, 0.0};
            H[1 * d_ + 0] = H[0 * d_ + 1];
            H[1 * d_ + 1] = {-radius_ * sp * cl, -radius_ * sp * sl, 0.0};
        }
        return H;
    case Kind::general_chart: {
        Vec uu(u.begin(), u.end());
        Vec zpp(n_), zpm(n_), zmp(n_), zmm(n_);
        for (int a = 0; a < d_; ++a) {
            for (int b = a; b < d_; ++b) {
                const double sa = 1e-4 * (1.0 + std::abs(u[a]));
                const double sb = 1e-4 * (1.0 + std::abs(u[b]));
                auto eval = [&](double da, double db, Vec& out) {
                    uu[a] = u[a] + da;
                    uu[b] += db; // handles a == b correctly
                    chart_fn_(uu, out);
                    uu[a] = u[a];
                    uu[b] = u[b];
                };
                eval(sa, sb, zpp);
                eval(sa, -sb, zpm);
                eval(-sa, sb, zmp);
                eval(-sa, -sb, zmm);
                Vec& hab = H[a * d_ + b];
                for (int i = 0; i < n_; ++i)
                    hab[i] = (zpp[i] - zpm[i] - zmp[i] + zmm[i]) / (4.0 * sa * sb);
                if (b != a) H[b * d_ + a] = hab;
            }
        }
        return H;
    }
    }
    return H;
}

double Submanifold::chart_density(std::span<const double> u) const {
    if (d_ == 0) return 1.0;
    const SmallMat J = jacobian(u);
    SmallMat G(d_, d_);
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i) s += J(i, a) * J(i, b);
            G(a, b) = s;
        }
    const double g = det(G);
    require(g > kRankTol, ErrorKind::degenerate_chart, "chart Jacobian rank-deficient");
    return std::sqrt(g);
}

std::vector<Vec> Submanifold::normal_frame(std::span<const double> u) const {
    std::vector<Vec> tang;
    if (d_ > 0) tang = tangent_onb(jacobian(u));
    std::vector<Vec> frame;
    const int want = n_ - d_;
    for (double thresh : {0.5, 1e-8}) {
        for (int i = 0; i < n_ && static_cast<int>(frame.size()) < want; ++i) {
            Vec v(n_, 0.0);
            v[i] = 1.0;
            for (const Vec& t : tang) axpy(-dot(v, t), t, v);
            for (const Vec& f : frame) axpy(-dot(v, f), f, v);
            const double nrm = norm2(v);
            if (nrm > thresh) {
                scale(1.0 / nrm, v);
                frame.push_back(std::move(v));
            }
        }
        if (static_cast<int>(frame.size()) == want) break;
    }
    require(static_cast<int>(frame.size()) == want, ErrorKind::degenerate_chart,
            "normal_frame: could not complete frame");
    return frame;
}

std::vector<Vec> Submanifold::transported_normal_frame(std::span<const double> u,
                                                       const std::vector<Vec>& frame) const {
    std::vector<Vec> tang;
    if (d_ > 0) tang = tangent_onb(jacobian(u));
    std::vector<Vec> out = frame;
    for (Vec& v : out)
        for (const Vec& t : tang) axpy(-dot(v, t), t, v);
    orthonormalize(out);
    return out;
}

TangentSplit tangent_projection(const Submanifold& gamma, std::span<const double> u,
                                std::span<const double> xi) {
    const int n = gamma.ambient_dim();
    TangentSplit s;
    s.tangential.assign(n, 0.0);
    s.normal.assign(xi.begin(), xi.end());
    if (gamma.manifold_dim() == 0) return s;
    const SmallMat J = gamma.jacobian(u);
    const int d = gamma.manifold_dim();
    SmallMat G(d, d);
    Vec rhs(d, 0.0);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            double g = 0.0;
            for (int i = 0; i < n; ++i) g += J(i, a) * J(i, b);
            G(a, b) = g;
        }
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += J(i, a) * xi[i];
        rhs[a] = r;
    }
    require(std::abs(det(G)) > kRankTol, ErrorKind::degenerate_chart,
            "tangent_projection: chart Jacobian rank-deficient");
    const Vec alpha = solve(G, rhs);
    for (int i = 0; i < n; ++i) {
        double t = 0.0;
        for (int a = 0; a < d; ++a) t += J(i, a) * alpha[a];
        s.tangential[i] = t;
        s.normal[i] = xi[i] - t;
    }
    return s;
}

namespace {

// Chart coordinates of an ambient tangent vector; throws precondition if the
// vector is not tangent.
Vec chart_coordinates(const Submanifold& gamma, const SmallMat& J, std::span<const double> X) {
    const int n = gamma.ambient_dim();
    const int d = gamma.manifold_dim();
    SmallMat G(d, d);
    Vec rhs(d, 0.0);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            double g = 0.0;
            for (int i = 0; i < n; ++i) g += J(i, a) * J(i, b);
            G(a, b) = g;
        }
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += J(i, a) * X[i];
        rhs[a] = r;
    }
    const Vec alpha = solve(G, rhs);
    double resid = 0.0, xnrm = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = 0.0;
        for (int a = 0; a < d; ++a) t += J(i, a) * alpha[a];
        resid += sq(X[i] - t);
        xnrm += sq(X[i]);
    }
    require(resid <= 1e-16 * (1.0 + xnrm) + 1e-24, ErrorKind::precondition,
            "second_fundamental_form: vector is not tangent");
    return alpha;
}

} // namespace

Vec second_fundamental_form(const Submanifold& gamma, std::span<const double> u,
                            std::span<const double> X, std::span<const double> Y) {
    const int n = gamma.ambient_dim();
    const int d = gamma.manifold_dim();
    if (d == 0) {
        require(norm2(X) < 1e-12 && norm2(Y) < 1e-12, ErrorKind::precondition,
                "second_fundamental_form: point manifold has trivial tangent space");
        return Vec(n, 0.0);
    }
    const SmallMat J = gamma.jacobian(u);
    const Vec a = chart_coordinates(gamma, J, X);
    const Vec b = chart_coordinates(gamma, J, Y);
    const std::vector<Vec> H = gamma.hessian(u);
    Vec v(n, 0.0);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) axpy(a[p] * b[q], H[p * d + q], v);
    // ambient derivative of the extended field -> keep the normal component
    const TangentSplit split = tangent_projection(gamma, u, v);
    return split.normal;
}

double second_fundamental_norm(const Submanifold& gamma, std::span<const double> u) {
    const int d = gamma.manifold_dim();
    if (d == 0) return 0.0;
    const SmallMat J = gamma.jacobian(u);
    const std::vector<Vec> tang = tangent_onb(J);
    const int n = gamma.ambient_dim();
    // II components against the tangent ONB
    std::vector<Vec> B(static_cast<std::size_t>(d) * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            B[a * d + b] = second_fundamental_form(gamma, u, tang[a], tang[b]);
    if (d == 1) return norm2(B[0]);
    // sampled sup over unit tangent pairs
    const int K = 48;
    double best = 0.0;
    auto unit_dir = [&](int k, Vec& w) {
        const double ang = 2.0 * M_PI * k / K;
        w.assign(d, 0.0);
        w[0] = std::cos(ang);
        w[1] = std::sin(ang);
    };
    Vec wa, wb, v(n);
    for (int ka = 0; ka < K; ++ka) {
        unit_dir(ka, wa);
        for (int kb = 0; kb < K; ++kb) {
            unit_dir(kb, wb);
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) s += wa[a] * wb[b] * B[a * d + b][i];
                v[i] = s;
            }
            best = std::max(best, norm2(v));
        }
    }
    return best;
}

namespace {

struct FiberNode {
    Vec theta;   // sphere-chart coordinates (size m), empty for m == 0
    double sign; // sheet for m == 0, else unused
    double weight;
};

std::vector<FiberNode> fiber_nodes_for(int m, int fiber_nodes, std::uint64_t seed) {
    std::vector<FiberNode> nodes;
    if (m == 0) {
        nodes.push_back({{}, +1.0, 1.0});
        nodes.push_back({{}, -1.0, 1.0});
        return nodes;
    }
    if (m == 1) {
        const Quad1d q = gauss_legendre(std::max(fiber_nodes, 4), 0.0, 2.0 * M_PI);
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
            nodes.push_back({{q.nodes[i]}, 0.0, q.weights[i]});
        return nodes;
    }
    if (m == 2) {
        const int np = std::max(4, static_cast<int>(std::lround(std::sqrt(fiber_nodes / 2.0))));
        const int nl = 2 * np;
        const Quad1d qp = gauss_legendre(np, 0.0, M_PI);
        const Quad1d ql = gauss_legendre(nl, 0.0, 2.0 * M_PI);
        for (std::size_t i = 0; i < qp.nodes.size(); ++i)
            for (std::size_t j = 0; j < ql.nodes.size(); ++j)
                nodes.push_back({{qp.nodes[i], ql.nodes[j]}, 0.0, qp.weights[i] * ql.weights[j]});
        return nodes;
    }
    // m >= 3: low-discrepancy directions, equal weights against |S^m|.
    const int count = std::max(fiber_nodes, 64);
    const double w = surface_area_of_sphere(m) / count;
    for (int i = 0; i < count; ++i) {
        // Halton -> Gaussian deviates -> unit direction in R^{m+1}
        const std::vector<double> p = halton_point(static_cast<std::uint64_t>(i) + seed % 1024, 2 * (m + 1));
        Vec dir(m + 1, 0.0);
        for (int c = 0; c < m + 1; ++c) {
            const double u1 = std::min(std::max(p[2 * c], 1e-12), 1.0 - 1e-12);
            const double u2 = p[2 * c + 1];
            dir[c] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        const double nrm = norm2(dir);
        if (nrm < 1e-12) continue;
        scale(1.0 / nrm, dir);
        FiberNode fn;
        fn.theta = dir; // stored as the direction itself; flagged by size m+1
        fn.sign = 0.0;
        fn.weight = w;
        nodes.push_back(std::move(fn));
    }
    return nodes;
}

// omega on S^{n-d-1} in the given normal frame.
Vec fiber_direction(int m, const FiberNode& node, const std::vector<Vec>& frame, int n) {
    Vec omega(n, 0.0);
    if (m == 0) {
        axpy(node.sign, frame[0], omega);
    } else if (m == 1) {
        axpy(std::cos(node.theta[0]), frame[0], omega);
        axpy(std::sin(node.theta[0]), frame[1], omega);
    } else if (m == 2) {
        const double sp = std::sin(node.theta[0]), cp = std::cos(node.theta[0]);
        axpy(sp * std::cos(node.theta[1]), frame[0], omega);
        axpy(sp * std::sin(node.theta[1]), frame[1], omega);
        axpy(cp, frame[2], omega);
    } else {
        for (int c = 0; c < m + 1; ++c) axpy(node.theta[c], frame[c], omega);
    }
    return omega;
}

struct ChartNodeSet {
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

ChartNodeSet chart_nodes_for(const Submanifold& gamma, int per_dim) {
    ChartNodeSet out;
    const int d = gamma.manifold_dim();
    if (d == 0) {
        out.nodes.push_back({});
        out.weights.push_back(1.0);
        return out;
    }
    std::vector<Quad1d> rules;
    for (int a = 0; a < d; ++a)
        rules.push_back(gauss_legendre(per_dim, gamma.chart_domain().lo[a], gamma.chart_domain().hi[a]));
    std::vector<int> idx(d, 0);
    while (true) {
        Vec u(d);
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            u[a] = rules[a].nodes[idx[a]];
            w *= rules[a].weights[idx[a]];
        }
        out.nodes.push_back(std::move(u));
        out.weights.push_back(w);
        int a = d - 1;
        while (a >= 0 && ++idx[a] == per_dim) idx[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

} // namespace

std::vector<NormalEnergyPoint> sample_energy_normal_bundle(const Submanifold& gamma,
                                                           const ScalarField& V1, double E0,
                                                           const BundleBudget& budget,
                                                           std::uint64_t seed) {
    const int n = gamma.ambient_dim();
    const int d = gamma.manifold_dim();
    const int m = n - d - 1;
    require(m >= 0, ErrorKind::precondition, "bundle: need d <= n-1");

    const ChartNodeSet chart = chart_nodes_for(gamma, budget.chart_nodes_per_dim);
    const std::vector<FiberNode> fiber = fiber_nodes_for(m, budget.fiber_nodes, seed);

    auto fiber_radius = [&](std::span<const double> z) {
        const double r2 = E0 - V1.value(z);
        require(r2 > 1e-12, ErrorKind::empty_fiber,
                "empty fiber: E0 - V1(z) <= 0 at a sampled chart point");
        return std::sqrt(r2);
    };

    std::vector<NormalEnergyPoint> out;
    out.reserve(chart.nodes.size() * fiber.size());

    for (std::size_t ci = 0; ci < chart.nodes.size(); ++ci) {
        const Vec& u0 = chart.nodes[ci];
        const std::vector<Vec> anchor = gamma.normal_frame(u0);

        // Embedding (u, theta) -> (z, xi) with the frame transported from u0.
        auto embed = [&](std::span<const double> u, const FiberNode& node, Vec& z, Vec& xi) {
            z = gamma.chart_point(u);
            const std::vector<Vec> frame =
                (d > 0) ? gamma.transported_normal_frame(u, anchor) : anchor;
            const double r = fiber_radius(z);
            const Vec omega = fiber_direction(m, node, frame, n);
            xi = scaled(r, omega);
        };

        for (const FiberNode& node : fiber) {
            Vec z0, xi0;
            embed(u0, node, z0, xi0);

            // Tangent directions of N_E Gamma at (z0, xi0) by central FD over
            // the d chart coordinates and (for m in {1,2}) the sphere angles.
            const int q = d + (m <= 2 ? m : 0);
            std::vector<Vec> Z(q, Vec(n, 0.0)), Xi(q, Vec(n, 0.0));
            int col = 0;
            Vec up, um, zp, zm, xip, xim;
            for (int a = 0; a < d; ++a, ++col) {
                const double step = budget.fd_step_rel * (1.0 + std::abs(u0[a]));
                up = u0;
                um = u0;
                up[a] += step;
                um[a] -= step;
                embed(up, node, zp, xip);
                embed(um, node, zm, xim);
                for (int i = 0; i < n; ++i) {
                    Z[col][i] = (zp[i] - zm[i]) / (2.0 * step);
                    Xi[col][i] = (xip[i] - xim[i]) / (2.0 * step);
                }
            }
            if (m >= 1 && m <= 2) {
                for (int t = 0; t < m; ++t, ++col) {
                    const double step = budget.fd_step_rel * (1.0 + std::abs(node.theta[t]));
                    FiberNode np = node, nm = node;
                    np.theta[t] += step;
                    nm.theta[t] -= step;
                    embed(u0, np, zp, xip);
                    embed(u0, nm, zm, xim);
                    for (int i = 0; i < n; ++i) {
                        Z[col][i] = 0.0;
                        Xi[col][i] = (xip[i] - xim[i]) / (2.0 * step);
                    }
                }
            }

            // Project the momentum parts onto (T_z Gamma + R xi)^perp.
            std::vector<Vec> proj_basis;
            if (d > 0) proj_basis = tangent_onb(gamma.jacobian(u0));
            Vec xhat = xi0;
            const double xn = norm2(xhat);
            require(xn > 1e-14, ErrorKind::empty_fiber, "bundle: zero covector");
            scale(1.0 / xn, xhat);
            proj_basis.push_back(xhat);
            for (int c = 0; c < q; ++c)
                for (const Vec& b : proj_basis) axpy(-dot(Xi[c], b), b, Xi[c]);

            double vol = 1.0;
            if (q > 0) {
                SmallMat G(q, q);
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j) G(i, j) = dot(Z[i], Z[j]) + dot(Xi[i], Xi[j]);
                const double g = det(G);
                require(g > 0.0, ErrorKind::degenerate_chart, "bundle Gram degenerate");
                vol = std::sqrt(g);
            }

            NormalEnergyPoint p;
            p.u = u0;
            p.z = z0;
            p.xi = xi0;
            p.weight = chart.weights[ci] * node.weight * vol;
            out.push_back(std::move(p));
        }
    }
    return out;
}

NonIncomingReport check_nonincoming(const Submanifold& gamma, double R1, double sigma1,
                                    const BundleBudget& budget) {
    NonIncomingReport rep;
    const int n = gamma.ambient_dim();
    const int d = gamma.manifold_dim();
    const int m = n - d - 1;
    const ChartNodeSet chart = chart_nodes_for(gamma, budget.chart_nodes_per_dim);
    const std::vector<FiberNode> fiber = fiber_nodes_for(m, budget.fiber_nodes, 1);

    for (std::size_t ci = 0; ci < chart.nodes.size(); ++ci) {
        const Vec& u0 = chart.nodes[ci];
        const Vec z = gamma.chart_point(u0);
        const double zn = norm2(z);
        rep.sampled += fiber.size();
        if (zn < R1) continue;
        const std::vector<Vec> frame = gamma.normal_frame(u0);
        for (const FiberNode& node : fiber) {
            const Vec xi = fiber_direction(m, node, frame, n);
            const double xin = norm2(xi);
            if (dot(z, xi) <= -sigma1 * zn * xin + 1e-14) {
                rep.pass = false;
                if (rep.witnesses.size() < 16) rep.witnesses.push_back({z, xi});
            }
        }
    }
    std::ostringstream os;
    os << "non-incoming check (R1=" << R1 << ", sigma1=" << sigma1 << "): sampled " << rep.sampled
       << " covectors, " << (rep.pass ? "pass" : "FAIL") << " (" << rep.witnesses.size()
       << " witnesses)";
    rep.summary = os.str();
    return rep;
}

} // namespace semilab
