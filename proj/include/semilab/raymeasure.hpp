#pragma once

// Evaluation of the predicted limit measure by damped Hamiltonian transport
// from the energy-shell normal bundle:
//
//   int q dmu = int_0^inf int_{N_E Gamma} kappa(z, xi) q(phi^t(z, xi))
//               e^{-2 t Im Etilde - 2 int_0^t V2(X(s)) ds} dsigma dt,
//
//   kappa(z, xi) = pi (2 pi)^{d-n} |A(z)|^2 |xi|^{-1} |S^(xi)|^2.
//
// Each ray's time integral truncates once the trajectory holds an escape
// certificate (inside the outgoing zone, beyond the symbol support, tail
// weight negligible); rays still unresolved at the horizon are reported as
// inconclusive with an explicit interval bound, never dropped.

#include <cstdint>
#include <string>
#include <vector>

#include "semilab/dynamics.hpp"
#include "semilab/geometry.hpp"
#include "semilab/source.hpp"
#include "semilab/symbols.hpp"

namespace semilab {

// kappa from the amplitude value at z (the chart-based convenience below
// evaluates A through u).
double kappa(std::span<const double> xi, double amplitude_at_z, const Profile& S, int d, int n);
double kappa_at(const NormalEnergyPoint& p, const Amplitude& A, const Profile& S, int d, int n);

struct RayProblem {
    const Submanifold* gamma = nullptr;
    const Amplitude* amplitude = nullptr;
    const Profile* profile = nullptr;
    const PotentialPair* potentials = nullptr;
    double E0 = 1.0;
    double im_etilde = 1.0;
    EscapeParams escape;      // certified outgoing zone and energy window
    BundleBudget bundle;
    double flow_tol = 1e-9;
    double horizon = 40.0;
    double chunk = 2.0;       // flow segment length between stop checks
    std::uint64_t seed = 1;
};

struct RayDiagnostic {
    Vec z, xi;
    double weight = 0.0;       // kappa * quadrature weight
    double escape_time = 0.0;  // NaN when inconclusive
    double damping_at_escape = 0.0;
    double contribution = 0.0; // weight * time integral
    bool conclusive = true;
};

struct MeasureEvaluation {
    std::string q_id;
    double value = 0.0;
    double error_estimate = 0.0;     // quadrature refinement + certified tails
    double inconclusive_bound = 0.0; // upper bound on unresolved-ray mass
    std::size_t rays = 0;
    std::size_t inconclusive_rays = 0;
    double max_energy_drift = 0.0;   // sup |p - E0| over retained samples
    std::vector<RayDiagnostic> diagnostics;
};

MeasureEvaluation evaluate_measure(const Symbol& q, const RayProblem& prob,
                                   bool with_diagnostics = false);

struct LiouvilleResult {
    double lhs = 0.0;      // int (-H_p q + 2 Im Etilde q + 2 V2 q) dmu
    double rhs = 0.0;      // int q kappa dsigma over the bundle
    double residual = 0.0; // lhs - rhs
};

// Both sides through the same bundle and ray ensemble; the identity is exact
// along each ray, so the residual measures quadrature error only.
LiouvilleResult liouville_residual(const Symbol& q, const RayProblem& prob);

struct TruncationComparison {
    double value_truncated_r0 = 0.0; // with A_{R0}
    double value_truncated_r = 0.0;  // with A_R
    double difference = 0.0;
    std::size_t uncertified_rays = 0; // annulus rays entering B_x(r) (violation report)
    double min_annulus_radius = 0.0;  // min |X| over annulus rays
};

// Same ray ensemble, two kappa weightings. `r_ball` is the radius of the ball
// containing supp_x q; annulus rays must stay outside it.
TruncationComparison truncation_compare(const Symbol& q, const RayProblem& prob, double R,
                                        double R0, double r_ball);

} // namespace semilab
