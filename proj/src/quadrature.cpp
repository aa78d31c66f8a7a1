#include "semilab/quadrature.hpp"

#include <cmath>

#include "semilab/errors.hpp"

namespace semilab {

Quad1d gauss_legendre(int n, double a, double b) {
    require(n >= 1, ErrorKind::precondition, "gauss_legendre: need n >= 1");
    Quad1d q;
    q.nodes.resize(n);
    q.weights.resize(n);
    // Nodes on [-1,1] by Newton iteration from the Chebyshev-like initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P'_n(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // Map to [a, b]; fill from the right so nodes come out increasing.
        q.nodes[n - 1 - i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        q.weights[n - 1 - i] = 0.5 * (b - a) * w;
    }
    return q;
}

Quad1d composite_gauss_legendre(int order, int panels, double a, double b) {
    require(panels >= 1, ErrorKind::precondition, "composite_gauss_legendre: need panels >= 1");
    Quad1d out;
    const double len = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        Quad1d panel = gauss_legendre(order, a + p * len, a + (p + 1) * len);
        out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
    }
    return out;
}

namespace {
double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}
} // namespace

std::vector<double> halton_point(std::uint64_t index, int dim) {
    static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    require(dim >= 1 && dim <= 12, ErrorKind::precondition, "halton_point: dim out of range");
    std::vector<double> p(dim);
    for (int d = 0; d < dim; ++d) p[d] = radical_inverse(index + 1, primes[d]);
    return p;
}

std::vector<double> simpson_weights(std::size_t count, double dt) {
    require(count >= 2, ErrorKind::precondition, "simpson_weights: need >= 2 samples");
    std::vector<double> w(count, 0.0);
    const std::size_t intervals = count - 1;
    std::size_t simpson_end = intervals;
    if (intervals % 2 != 0) simpson_end = intervals - 1; // trapezoid tail on the last interval
    if (simpson_end >= 2) {
        w[0] += dt / 3.0;
        w[simpson_end] += dt / 3.0;
        for (std::size_t k = 1; k < simpson_end; ++k) w[k] += (k % 2 == 1 ? 4.0 : 2.0) * dt / 3.0;
    } else {
        simpson_end = 0;
    }
    if (simpson_end < intervals) {
        for (std::size_t k = simpson_end; k < intervals; ++k) {
            w[k] += 0.5 * dt;
            w[k + 1] += 0.5 * dt;
        }
    }
    return w;
}

} // namespace semilab
