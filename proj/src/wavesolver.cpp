#include "semilab/wavesolver.hpp"

#include <algorithm>
#include <cmath>

#include "semilab/fft.hpp"
#include "semilab/quadrature.hpp"
#include "semilab/quantization.hpp"

namespace semilab {

void EnergyTrack::validate() const {
    require(E0 > 0.0, ErrorKind::precondition, "energy track: E0 must be positive");
    require(Eh().imag() >= -1e-15, ErrorKind::precondition, "energy track: Im E_h must be >= 0");
    require(e1 > 0.0 && e2 >= e1, ErrorKind::precondition, "energy track: bad window");
    const double re = Eh().real();
    require(re >= e1 - 1e-12 && re <= e2 + 1e-12, ErrorKind::precondition,
            "energy track: Re E_h outside the window J");
    const double gate = sq(0.5 * (1.0 + sigma1)) * e2;
    require(gate < e1, ErrorKind::precondition,
            "energy track: window inequality ((1+sigma1)/2)^2 E2 < E1 fails (" +
                std::to_string(gate) + " >= " + std::to_string(e1) + ")");
}

double CutoffFunction::operator()(double t) const {
    if (t <= T) return 1.0;
    const double s = (t - T) / tau0;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::vector<double> sponge_profile(const GridSpec& grid, const SpongeSpec& sponge) {
    if (!sponge.enabled || sponge.amplitude == 0.0) return {};
    std::vector<double> w(grid.size(), 0.0);
    std::vector<int> idx;
    for (std::size_t f = 0; f < w.size(); ++f) {
        unflatten(grid, f, idx);
        double v = 0.0;
        for (int a = 0; a < grid.n; ++a) {
            const double half = 0.5 * grid.axis_length(a);
            const double center = grid.origin[a] + 0.5 * (grid.dims[a] - 1) * grid.spacing[a];
            const double on = (1.0 - sponge.width_frac) * half;
            const double r = std::abs(grid.coord(a, idx[a]) - center);
            if (r > on) v += sq(sq((r - on) / (half - on)));
        }
        w[f] = sponge.amplitude * v;
    }
    return w;
}

Propagator::Propagator(const GridSpec& grid, double h, double dt, const PotentialPair& pots,
                       const SpongeSpec& sponge, double energy_scale)
    : grid_(grid), dt_(dt) {
    require(dt > 0.0, ErrorKind::precondition, "propagator: dt must be positive");
    check_resolves(grid, h);

    const std::vector<double> w_sp = sponge_profile(grid, sponge);
    half_phase_.resize(grid.size());
    double v1_max = 0.0;
    std::vector<int> idx;
    Vec x(grid.n);
    for (std::size_t f = 0; f < half_phase_.size(); ++f) {
        unflatten(grid, f, idx);
        for (int a = 0; a < grid.n; ++a) x[a] = grid.coord(a, idx[a]);
        const double v1 = pots.V1.value(x);
        const double v2 = pots.V2.value(x) + (w_sp.empty() ? 0.0 : w_sp[f]);
        v1_max = std::max(v1_max, std::abs(v1));
        // exp(-i dt/2 (V1 - i h V2)/h) = exp(-dt V2/2) exp(-i dt V1 / (2h))
        half_phase_[f] = std::exp(Complex(-0.5 * dt * v2, -0.5 * dt * v1 / h));
    }

    // Phase-per-step budget on the occupied scales: potential phase and the
    // kinetic phase at the top of the energy window.
    const double pot_phase = dt * v1_max / h;
    const double kin_phase = energy_scale > 0.0 ? dt * energy_scale / h : 0.0;
    if (std::max(pot_phase, kin_phase) > M_PI / 4.0)
        fail(ErrorKind::stability,
             "time step too large: phase per step " +
                 std::to_string(std::max(pot_phase, kin_phase)) + " exceeds pi/4");

    kinetic_.resize(grid.size());
    for (std::size_t f = 0; f < kinetic_.size(); ++f) {
        unflatten(grid, f, idx);
        double k2 = 0.0;
        for (int a = 0; a < grid.n; ++a) k2 += sq(grid.wavenumber(a, idx[a]));
        kinetic_[f] = std::exp(Complex(0.0, -dt * h * k2));
    }
}

void Propagator::step(std::vector<Complex>& data) const {
    for (std::size_t f = 0; f < data.size(); ++f) data[f] *= half_phase_[f];
    fft_inplace(data.data(), grid_.dims, -1);
    for (std::size_t f = 0; f < data.size(); ++f) data[f] *= kinetic_[f];
    fft_inplace(data.data(), grid_.dims, +1);
    const double inv = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t f = 0; f < data.size(); ++f) data[f] *= inv * half_phase_[f];
}

GridField propagate_step(const GridField& u, double dt, const PotentialPair& pots,
                         const SpongeSpec& sponge, double energy_scale) {
    const Propagator prop(u.spec, u.h, dt, pots, sponge, energy_scale);
    GridField out = u;
    prop.step(out.data);
    return out;
}

GridField partial_solution(const GridField& Sh, const EnergyTrack& track,
                           const CutoffFunction& eta, double dt, const PotentialPair& pots,
                           const SpongeSpec& sponge, PartialSolutionDiag* diag) {
    track.validate();
    const double h = track.h;
    require(Sh.h == h, ErrorKind::precondition, "partial_solution: field h mismatch");

    // limiting absorption: either Im Etilde > 0 or nonnegative V2 with finite T
    if (track.Etilde.imag() <= 0.0) {
        double v2min = 0.0;
        std::vector<int> idx;
        Vec x(Sh.spec.n);
        for (std::size_t f = 0; f < Sh.spec.size(); f += 7) {
            unflatten(Sh.spec, f, idx);
            for (int a = 0; a < Sh.spec.n; ++a) x[a] = Sh.spec.coord(a, idx[a]);
            v2min = std::min(v2min, pots.V2.value(x));
        }
        require(v2min >= 0.0 && std::isfinite(eta.T), ErrorKind::precondition,
                "partial_solution: needs Im Etilde > 0 or V2 >= 0 with finite T");
    }

    const double horizon = eta.T + eta.tau0;
    std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    if (steps % 2 != 0) ++steps; // even interval count for Simpson
    const std::vector<double> w = simpson_weights(steps + 1, dt);

    const Propagator prop(Sh.spec, h, dt, pots, sponge, track.e2);
    const Complex Eh = track.Eh();

    GridField acc(Sh.spec, h);
    std::vector<Complex> u = Sh.data;
    PartialSolutionDiag local;
    PartialSolutionDiag& dg = diag ? *diag : local;
    dg.norm_trace.clear();
    dg.steps = steps;

    double cell = 1.0;
    for (int a = 0; a < Sh.spec.n; ++a) cell *= Sh.spec.spacing[a];

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = k * dt;
        // e^{i t E_h / h} decays like e^{-t Im Etilde} since Im E_h = h Im Etilde
        const Complex osc = std::exp(Complex(0.0, 1.0) * (t * Eh / h));
        double nrm = 0.0;
        for (const Complex& v : u) nrm += std::norm(v);
        nrm = std::sqrt(nrm * cell) * std::abs(osc);
        dg.norm_trace.push_back(nrm);
        dg.integrand_max = std::max(dg.integrand_max, nrm);

        const Complex coeff = Complex(0.0, 1.0 / h) * eta(t) * osc * w[k];
        if (coeff != Complex(0.0, 0.0))
            for (std::size_t f = 0; f < u.size(); ++f) acc.data[f] += coeff * u[f];
        if (k < steps) prop.step(u);
    }
    dg.integrand_final = dg.norm_trace.back();
    dg.convergence_guard_ok = dg.integrand_final <= 1e-6 * dg.integrand_max;
    if (!dg.convergence_guard_ok) dg.divergence_warning = true;
    return acc;
}

std::vector<ObservableRow> solve_observables(const GridField& u,
                                             const std::vector<Symbol>& symbols,
                                             const SpongeSpec& sponge) {
    std::vector<ObservableRow> rows;
    for (const Symbol& q : symbols) {
        if (sponge.enabled && q.x_support) {
            for (int a = 0; a < u.spec.n; ++a) {
                const double half = 0.5 * u.spec.axis_length(a);
                const double center =
                    u.spec.origin[a] + 0.5 * (u.spec.dims[a] - 1) * u.spec.spacing[a];
                const double on = (1.0 - sponge.width_frac) * half;
                const double reach = std::max(std::abs(q.x_support->lo[a] - center),
                                              std::abs(q.x_support->hi[a] - center));
                if (reach >= on - 2.0 * u.spec.spacing[a])
                    fail(ErrorKind::contamination,
                         "observable '" + q.id + "' support overlaps the absorbing sponge");
            }
        }
        const PairingResult r = wigner_pairing(q, u);
        rows.push_back({q.id, u.h, r.value, r.tail_bound});
    }
    return rows;
}

} // namespace semilab
