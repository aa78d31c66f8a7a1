#include "semilab/potentials.hpp"

#include <cmath>
#include <sstream>

namespace semilab {

double PotentialTerm::value(std::span<const double> x) const {
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::constant:
        return amplitude;
    case Kind::gaussian: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(x[i] - center[i]);
        return amplitude * std::exp(-r2 / sq(width));
    }
    case Kind::plummer: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(x[i] - center[i]);
        return amplitude / std::sqrt(r2 + sq(core));
    }
    }
    return 0.0;
}

void PotentialTerm::add_gradient(std::span<const double> x, std::span<double> g) const {
    switch (kind) {
    case Kind::zero:
    case Kind::constant:
        return;
    case Kind::gaussian: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(x[i] - center[i]);
        const double f = amplitude * std::exp(-r2 / sq(width)) * (-2.0 / sq(width));
        for (std::size_t i = 0; i < x.size(); ++i) g[i] += f * (x[i] - center[i]);
        return;
    }
    case Kind::plummer: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(x[i] - center[i]);
        const double f = -amplitude / std::pow(r2 + sq(core), 1.5);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] += f * (x[i] - center[i]);
        return;
    }
    }
}

bool ScalarField::is_zero() const {
    for (const auto& t : terms)
        if (t.kind != PotentialTerm::Kind::zero && t.amplitude != 0.0) return false;
    return true;
}

double ScalarField::sup_abs_on_grid(int n, double half_width, int samples_per_axis) const {
    double m = 0.0;
    std::vector<int> idx(n, 0);
    Vec x(n, 0.0);
    const int N = samples_per_axis;
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(N);
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t r = f;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(r % N);
            r /= N;
        }
        for (int a = 0; a < n; ++a) x[a] = -half_width + 2.0 * half_width * idx[a] / (N - 1);
        m = std::max(m, std::abs(value(x)));
    }
    return m;
}

DecayFitReport check_potential_decay(const PotentialPair& pots, int n, double half_width,
                                     int samples_per_axis) {
    DecayFitReport rep;
    rep.rho = pots.rho;
    std::vector<int> idx(n, 0);
    Vec x(n, 0.0);
    const int N = samples_per_axis;
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(N);
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t r = f;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(r % N);
            r /= N;
        }
        double x2 = 0.0;
        for (int a = 0; a < n; ++a) {
            x[a] = -half_width + 2.0 * half_width * idx[a] / (N - 1);
            x2 += sq(x[a]);
        }
        const double w = std::sqrt(1.0 + x2);
        rep.c_v1 = std::max(rep.c_v1, std::abs(pots.V1.value(x)) * std::pow(w, pots.rho));
        rep.c_v2 = std::max(rep.c_v2, std::abs(pots.V2.value(x)) * std::pow(w, 1.0 + pots.rho));
    }
    std::ostringstream os;
    os << "decay fit (rho=" << rep.rho << "): C_V1=" << rep.c_v1 << " C_V2=" << rep.c_v2;
    rep.summary = os.str();
    return rep;
}

} // namespace semilab
