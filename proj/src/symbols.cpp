#include "semilab/symbols.hpp"

#include <cmath>

namespace semilab {

double Symbol::value(std::span<const double> x, std::span<const double> xi) const {
    return val(x, xi);
}

void Symbol::gradient(std::span<const double> x, std::span<const double> xi, std::span<double> gx,
                      std::span<double> gxi) const {
    if (grad) {
        grad(x, xi, gx, gxi);
        return;
    }
    // central finite differences
    Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
    Vec kp(xi.begin(), xi.end()), km(xi.begin(), xi.end());
    for (int i = 0; i < dim; ++i) {
        const double sx = 1e-6 * (1.0 + std::abs(x[i]));
        xp[i] = x[i] + sx;
        xm[i] = x[i] - sx;
        gx[i] = (val(xp, xi) - val(xm, xi)) / (2.0 * sx);
        xp[i] = x[i];
        xm[i] = x[i];
        const double sk = 1e-6 * (1.0 + std::abs(xi[i]));
        kp[i] = xi[i] + sk;
        km[i] = xi[i] - sk;
        gxi[i] = (val(x, kp) - val(x, km)) / (2.0 * sk);
        kp[i] = xi[i];
        km[i] = xi[i];
    }
}

bool Symbol::outside_x_support(std::span<const double> x) const {
    if (!x_support) return false;
    for (int i = 0; i < dim; ++i)
        if (x[i] < x_support->lo[i] || x[i] > x_support->hi[i]) return true;
    return false;
}

double bump_profile(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

double bump_profile_derivative(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double d = 1.0 - s2;
    return bump_profile(s) * (-2.0 * s / (d * d));
}

double plateau_theta(double s) {
    s = std::abs(s);
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    const double smooth = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    return 1.0 - smooth;
}

namespace {

// radial bump centered at c with radius r: amp * bump(|y - c| / r)
struct RadialBump {
    Vec c;
    double r;
    double amp;
    double value(std::span<const double> y) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) d2 += sq(y[i] - c[i]);
        return amp * bump_profile(std::sqrt(d2) / r);
    }
    // gradient via g'(s)/s, finite at the center
    void add_gradient(std::span<const double> y, std::span<double> g, double scale_all = 1.0) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) d2 += sq(y[i] - c[i]);
        const double s = std::sqrt(d2) / r;
        if (s >= 1.0) return;
        const double dg_over_s =
            (s < 1e-8) ? -2.0 * bump_profile(s) : bump_profile_derivative(s) / s;
        const double f = amp * scale_all * dg_over_s / (r * r);
        for (std::size_t i = 0; i < y.size(); ++i) g[i] += f * (y[i] - c[i]);
    }
    Box box() const {
        Box b;
        b.lo.resize(c.size());
        b.hi.resize(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            b.lo[i] = c[i] - r;
            b.hi[i] = c[i] + r;
        }
        return b;
    }
};

// shell bump in |xi|: amp * bump((|xi| - rho) / w), support the annulus rho +- w
struct ShellBump {
    double rho, w, amp;
    double value(std::span<const double> xi) const {
        return amp * bump_profile((norm2(xi) - rho) / w);
    }
    void add_gradient(std::span<const double> xi, std::span<double> g, double scale_all = 1.0) const {
        const double r = norm2(xi);
        if (r < 1e-12) return; // flat at the origin for rho > w
        const double s = (r - rho) / w;
        const double f = amp * scale_all * bump_profile_derivative(s) / (w * r);
        for (std::size_t i = 0; i < xi.size(); ++i) g[i] += f * xi[i];
    }
    Box box(int n) const {
        Box b;
        b.lo.assign(n, -(rho + w));
        b.hi.assign(n, rho + w);
        return b;
    }
};

} // namespace

Symbol make_symbol(int n, const std::string& id, const SymbolParams& p) {
    Symbol q;
    q.id = id;
    q.dim = n;
    q.sup_bound = std::abs(p.amplitude);

    if (p.kind == "xbump") {
        RadialBump ax{p.x_center, p.x_radius, p.amplitude};
        q.x_only = true;
        q.x_support = ax.box();
        q.val = [ax](std::span<const double> x, std::span<const double>) { return ax.value(x); };
        q.grad = [ax](std::span<const double> x, std::span<const double>, std::span<double> gx,
                      std::span<double> gxi) {
            for (double& v : gx) v = 0.0;
            for (double& v : gxi) v = 0.0;
            ax.add_gradient(x, gx);
        };
        SeparableTerm t;
        t.a = [ax](std::span<const double> x) { return ax.value(x); };
        t.b = [](std::span<const double>) { return 1.0; };
        t.xbox = ax.box();
        q.terms.push_back(std::move(t));
        return q;
    }

    if (p.kind == "xionly_shell") {
        ShellBump bx{p.shell_rho, p.shell_width, p.amplitude};
        q.xi_only = true;
        q.xi_support = bx.box(n);
        q.val = [bx](std::span<const double>, std::span<const double> xi) { return bx.value(xi); };
        q.grad = [bx](std::span<const double>, std::span<const double> xi, std::span<double> gx,
                      std::span<double> gxi) {
            for (double& v : gx) v = 0.0;
            for (double& v : gxi) v = 0.0;
            bx.add_gradient(xi, gxi);
        };
        SeparableTerm t;
        t.a = [](std::span<const double>) { return 1.0; };
        t.b = [bx](std::span<const double> xi) { return bx.value(xi); };
        t.xibox = bx.box(n);
        q.terms.push_back(std::move(t));
        return q;
    }

    if (p.kind == "shell") {
        RadialBump ax{p.x_center, p.x_radius, 1.0};
        ShellBump bx{p.shell_rho, p.shell_width, p.amplitude};
        q.x_support = ax.box();
        q.xi_support = bx.box(n);
        q.val = [ax, bx](std::span<const double> x, std::span<const double> xi) {
            return ax.value(x) * bx.value(xi);
        };
        q.grad = [ax, bx](std::span<const double> x, std::span<const double> xi,
                          std::span<double> gx, std::span<double> gxi) {
            for (double& v : gx) v = 0.0;
            for (double& v : gxi) v = 0.0;
            ax.add_gradient(x, gx, bx.value(xi));
            bx.add_gradient(xi, gxi, ax.value(x));
        };
        SeparableTerm t;
        t.a = [ax](std::span<const double> x) { return ax.value(x); };
        t.b = [bx](std::span<const double> xi) { return bx.value(xi); };
        t.xbox = ax.box();
        t.xibox = bx.box(n);
        q.terms.push_back(std::move(t));
        return q;
    }

    if (p.kind == "ball") {
        RadialBump ax{p.x_center, p.x_radius, 1.0};
        RadialBump bx{p.xi_center, p.xi_radius, p.amplitude};
        q.x_support = ax.box();
        q.xi_support = bx.box();
        q.val = [ax, bx](std::span<const double> x, std::span<const double> xi) {
            return ax.value(x) * bx.value(xi);
        };
        q.grad = [ax, bx](std::span<const double> x, std::span<const double> xi,
                          std::span<double> gx, std::span<double> gxi) {
            for (double& v : gx) v = 0.0;
            for (double& v : gxi) v = 0.0;
            ax.add_gradient(x, gx, bx.value(xi));
            bx.add_gradient(xi, gxi, ax.value(x));
        };
        SeparableTerm t;
        t.a = [ax](std::span<const double> x) { return ax.value(x); };
        t.b = [bx](std::span<const double> xi) { return bx.value(xi); };
        t.xbox = ax.box();
        t.xibox = bx.box();
        q.terms.push_back(std::move(t));
        return q;
    }

    fail(ErrorKind::unsupported_symbol, "unknown symbol kind: " + p.kind);
}

ZoneContainment check_zone_containment(const Symbol& q, double R, double sigma, int samples) {
    ZoneContainment out;
    require(q.x_support.has_value() && q.xi_support.has_value(), ErrorKind::precondition,
            "zone containment needs declared supports");
    const int n = q.dim;
    out.worst_alignment = -1e300;
    out.min_radius = 1e300;
    std::vector<int> idx(2 * n, 0);
    Vec x(n), xi(n);
    while (true) {
        for (int i = 0; i < n; ++i) {
            const double tx = samples == 1 ? 0.5 : static_cast<double>(idx[i]) / (samples - 1);
            x[i] = q.x_support->lo[i] + tx * (q.x_support->hi[i] - q.x_support->lo[i]);
            const double tk = samples == 1 ? 0.5 : static_cast<double>(idx[n + i]) / (samples - 1);
            xi[i] = q.xi_support->lo[i] + tk * (q.xi_support->hi[i] - q.xi_support->lo[i]);
        }
        const double xn = norm2(x), kn = norm2(xi);
        out.min_radius = std::min(out.min_radius, xn);
        out.worst_alignment = std::max(out.worst_alignment, dot(x, xi) + sigma * xn * kn);
        int a = 2 * n - 1;
        while (a >= 0 && ++idx[a] == samples) idx[a--] = 0;
        if (a < 0) break;
    }
    out.inside = (out.worst_alignment <= 0.0) && (out.min_radius >= R);
    return out;
}

} // namespace semilab
