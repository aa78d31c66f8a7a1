#pragma once

// Classical flow of p(x, xi) = |xi|^2 + V1(x): x' = 2 xi, xi' = -grad V1(x).
// Leapfrog with compensated accumulation (exact free flight, bounded energy
// oscillation), fixed step selected by Richardson halving against a tolerance.
// The absorption integral D(t) = int_0^t V2(X(s)) ds is co-integrated on the
// same grid by the trapezoid rule.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "semilab/potentials.hpp"
#include "semilab/symbols.hpp"
#include "semilab/vec.hpp"

namespace semilab {

struct PhasePoint {
    Vec x, xi;
};

double hamiltonian(const PotentialPair& pots, const PhasePoint& w);

enum class TrajectoryStatus { running, escaped_outgoing, horizon_reached };

struct Trajectory {
    std::vector<double> times; // uniform spacing, starting at 0
    std::vector<PhasePoint> states;
    std::vector<double> damping; // D at the stored times
    TrajectoryStatus status = TrajectoryStatus::running;
    double escape_time = std::numeric_limits<double>::quiet_NaN();
    bool radius_monotone_after_escape = true;
    double dt_used = 0.0;
    double store_dt = 0.0;

    const PhasePoint& back() const { return states.back(); }
};

struct FlowOptions {
    double dt_init = 2e-3;
    int max_halvings = 22;
    std::size_t max_stored = 2000000;
    double energy_tol = 1e-8; // accepted runs must conserve p to this level
};

// Integrates [0, t_end] (t_end may be negative) to local tolerance `tol`.
Trajectory flow(const PhasePoint& w, double t_end, double tol, const PotentialPair& pots,
                const FlowOptions& opts = {});

// Z_{+/-}(R, nu, sigma) membership: |x| >= R, |xi| >= nu and
// <x, xi> >= sigma |x||xi| (sign > 0) or <= sigma |x||xi| (sign < 0).
bool zone_membership(const PhasePoint& w, double R, double nu, double sigma, int sign);

struct EscapeParams {
    double radius = 0.0; // script-R of the outgoing zone
    double sigma3 = 0.5;
    double e1 = 0.0, e2 = 0.0; // energy window J
};

// Marks the first stored state inside Z_+(R, 0, -sigma3) with energy in J as
// the escape certificate and asserts |X| is nondecreasing afterwards.
void escape_monitor(Trajectory& traj, const PotentialPair& pots, const EscapeParams& params);

// H_p q = 2 xi . grad_x q - grad V1(x) . grad_xi q
double hp_derivative(const Symbol& q, const PhasePoint& w, const PotentialPair& pots);

struct DampingReport {
    bool pass = true;
    bool vacuous = false;   // no trapped samples found
    int trapped = 0;
    int escaped = 0;
    double min_max_damping = std::numeric_limits<double>::infinity();
    std::string summary;
};

// Finite-horizon heuristic for the weak-absorption hypothesis: samples energy-E0
// phase points in a box, flows them for t_max, and reports
// min over trapped samples of max_{T <= t_max} D(T).
DampingReport check_damping_hypothesis(int n, double E0, double t_max, int samples,
                                       const PotentialPair& pots, double sample_halfwidth,
                                       const EscapeParams& escape, std::uint64_t seed);

} // namespace semilab
