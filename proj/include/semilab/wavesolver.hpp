#pragma once

// Finite-time outgoing solution u_h^T = (i/h) int_0^inf eta_T(t) e^{i t E_h / h}
// U_h(t) S_h dt with U_h(t) = e^{-i t H_h / h}, H_h = -h^2 Lap + V1 - i h V2.
// Time stepping is Strang splitting (half potential phase, exact kinetic
// multiplier in Fourier, half potential phase); the grid torus emulates an
// open domain through an absorbing sponge added to V2 near the box edge.

#include <complex>
#include <string>
#include <vector>

#include "semilab/grid.hpp"
#include "semilab/potentials.hpp"
#include "semilab/symbols.hpp"

namespace semilab {

struct EnergyTrack {
    double E0 = 1.0;
    Complex Etilde{0.0, 1.0};
    double h = 0.1;
    double e1 = 0.9, e2 = 1.1; // window J = [e1, e2]
    double sigma1 = 0.1;

    Complex Eh() const { return Complex(E0, 0.0) + h * Etilde; }
    // Im E_h >= 0, Re E_h in J, and the window inequality
    // ((1 + sigma1)/2)^2 e2 < e1.
    void validate() const;
};

struct CutoffFunction {
    double T = 6.0;
    double tau0 = 1.0;
    // 1 on (-inf, T], smooth non-increasing ramp exp(1 - 1/(1 - s^2)) with
    // s = (t - T)/tau0, 0 on [T + tau0, inf).
    double operator()(double t) const;
};

struct SpongeSpec {
    double width_frac = 0.15; // outer fraction of the box carrying absorption
    double amplitude = 5.0;   // quartic ramp peak value
    bool enabled = true;
};

// W_sponge(x) >= 0 on the grid (empty vector when disabled).
std::vector<double> sponge_profile(const GridSpec& grid, const SpongeSpec& sponge);

// One Strang step of e^{-i dt H_h / h} (with the sponge folded into V2).
// Checks the phase-per-step stability budget against `energy_scale` (the top
// of the energy window; pass 0 to skip).
GridField propagate_step(const GridField& u, double dt, const PotentialPair& pots,
                         const SpongeSpec& sponge, double energy_scale = 0.0);

// Reusable stepper with precomputed phase tables.
class Propagator {
public:
    Propagator(const GridSpec& grid, double h, double dt, const PotentialPair& pots,
               const SpongeSpec& sponge, double energy_scale);
    void step(std::vector<Complex>& data) const;
    double dt() const { return dt_; }

private:
    GridSpec grid_;
    double dt_;
    std::vector<Complex> half_phase_; // e^{-i dt/2 (V1 - i h V2eff)/h}
    std::vector<Complex> kinetic_;    // e^{-i dt h |k|^2}
};

struct PartialSolutionDiag {
    double integrand_max = 0.0;
    double integrand_final = 0.0;
    bool convergence_guard_ok = true; // final <= 1e-6 max
    bool divergence_warning = false;
    std::size_t steps = 0;
    std::vector<double> norm_trace; // |e^{itE_h/h}| ||U(t) S_h|| at each step
};

GridField partial_solution(const GridField& Sh, const EnergyTrack& track,
                           const CutoffFunction& eta, double dt, const PotentialPair& pots,
                           const SpongeSpec& sponge, PartialSolutionDiag* diag = nullptr);

struct ObservableRow {
    std::string q_id;
    double h = 0.0;
    Complex value{0.0, 0.0};
    double tail_bound = 0.0;
};

// Pairings <Op_h^w(q) u, u> for each symbol. Every symbol's x-support must
// stay strictly inside the box minus the sponge (contamination error).
std::vector<ObservableRow> solve_observables(const GridField& u,
                                             const std::vector<Symbol>& symbols,
                                             const SpongeSpec& sponge);

} // namespace semilab
