#include "semilab/raymeasure.hpp"

#include <algorithm>
#include <cmath>

#include "semilab/quadrature.hpp"

namespace semilab {

double kappa(std::span<const double> xi, double amplitude_at_z, const Profile& S, int d, int n) {
    const double speed = norm2(xi);
    require(speed > 1e-14, ErrorKind::singularity, "kappa: |xi| = 0");
    const double shat = S.fourier(xi);
    return M_PI * std::pow(2.0 * M_PI, d - n) * sq(amplitude_at_z) * sq(shat) / speed;
}

double kappa_at(const NormalEnergyPoint& p, const Amplitude& A, const Profile& S, int d, int n) {
    return kappa(p.xi, A.value(p.u), S, d, n);
}

namespace {

// outer radius of the x-support ball of q (for escape certificates)
double support_radius(const Symbol& q) {
    if (!q.x_support) return 0.0;
    double r2 = 0.0;
    const int n = q.dim;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
            const double c =
                (corner >> a) & 1 ? q.x_support->hi[a] : q.x_support->lo[a];
            s += sq(c);
        }
        r2 = std::max(r2, s);
    }
    return std::sqrt(r2);
}

struct RayIntegral {
    double time_integral = 0.0;      // int q(phi^t) weight(t) dt
    double liouville_integral = 0.0; // int (-H_p q + (2 imE + 2 V2) q) weight dt
    double refine_gap = 0.0;         // |Simpson - trapezoid| accumulated
    double escape_time = std::numeric_limits<double>::quiet_NaN();
    double damping_end = 0.0;
    double min_radius = 1e300;
    double tail_bound = 0.0;
    double max_energy_drift = 0.0;
    bool conclusive = false;
};

// Marches one ray in chunks, accumulating the damped time integrals until the
// escape certificate allows truncation or the horizon is hit.
RayIntegral trace_ray(const Symbol& q, const RayProblem& prob, const NormalEnergyPoint& start,
                      bool want_liouville) {
    RayIntegral out;
    const PotentialPair& pots = *prob.potentials;
    const double r_q = support_radius(q);
    const double imE = prob.im_etilde;
    const int n = q.dim;

    PhasePoint w{start.z, start.xi};
    const double p0 = hamiltonian(pots, w);
    double t_base = 0.0, d_base = 0.0;
    bool escaped = false;
    double sup_q = q.sup_bound;
    Vec gx(n), gxi(n), gv(n);

    Kahan acc, acc_liou;
    while (t_base < prob.horizon) {
        const double span = std::min(prob.chunk, prob.horizon - t_base);
        Trajectory traj = flow(w, span, prob.flow_tol, pots);
        escape_monitor(traj, pots, prob.escape);

        const std::size_t count = traj.states.size();
        const std::vector<double> ws = simpson_weights(count, traj.store_dt);
        Kahan chunk_acc, chunk_liou, chunk_trap;
        for (std::size_t i = 0; i < count; ++i) {
            const PhasePoint& s = traj.states[i];
            const double t = t_base + traj.times[i];
            const double weight = std::exp(-2.0 * t * imE - 2.0 * (d_base + traj.damping[i]));
            const double qv = q.value(s.x, s.xi);
            chunk_acc.add(ws[i] * qv * weight);
            const double trap_w =
                (i == 0 || i + 1 == count) ? 0.5 * traj.store_dt : traj.store_dt;
            chunk_trap.add(trap_w * qv * weight);
            if (want_liouville) {
                const double hpq = hp_derivative(q, s, pots);
                const double v2 = pots.V2.value(s.x);
                chunk_liou.add(ws[i] * (-hpq + (2.0 * imE + 2.0 * v2) * qv) * weight);
            }
            out.min_radius = std::min(out.min_radius, norm2(s.x));
            out.max_energy_drift =
                std::max(out.max_energy_drift, std::abs(hamiltonian(pots, s) - p0));
        }
        acc.add(chunk_acc.sum);
        acc_liou.add(chunk_liou.sum);
        out.refine_gap += std::abs(chunk_acc.sum - chunk_trap.sum);

        if (!escaped && traj.status == TrajectoryStatus::escaped_outgoing) {
            escaped = true;
            out.escape_time = t_base + traj.escape_time;
        }
        t_base += span;
        d_base += traj.damping.back();
        w = traj.back();
        out.damping_end = d_base;

        if (escaped && norm2(w.x) >= r_q * 1.0001 + 1e-9) {
            // Outgoing certificate plus |X| beyond the support ball: the radius
            // is nondecreasing from here on, so q vanishes along the remaining
            // ray and the damping-weight tail of the integral is exactly zero
            // (trivially within the 1e-8 acceptance of the accumulated value).
            out.conclusive = true;
            out.tail_bound = 0.0;
            break;
        }
    }
    if (!out.conclusive) {
        if (imE > 0.0) {
            out.tail_bound =
                sup_q * std::exp(-2.0 * t_base * imE - 2.0 * d_base) / (2.0 * imE);
        } else {
            fail(ErrorKind::precondition,
                 "inconclusive ray with Im Etilde = 0: expr-mu tail is unbounded "
                 "(ray horizon reached while still relevant to supp q)");
        }
    }
    out.time_integral = acc.sum;
    out.liouville_integral = acc_liou.sum;
    return out;
}

struct EnsembleResult {
    double value = 0.0;
    double liouville_lhs = 0.0;
    double rhs = 0.0;
    double refine = 0.0;
    double tails = 0.0;
    double inconclusive_bound = 0.0;
    std::size_t rays = 0, inconclusive = 0;
    double max_energy_drift = 0.0;
    std::vector<RayDiagnostic> diagnostics;
};

EnsembleResult run_ensemble(const Symbol& q, const RayProblem& prob, const BundleBudget& budget,
                            bool want_liouville, bool with_diagnostics) {
    EnsembleResult res;
    const int d = prob.gamma->manifold_dim();
    const int n = prob.gamma->ambient_dim();
    const auto bundle =
        sample_energy_normal_bundle(*prob.gamma, prob.potentials->V1, prob.E0, budget, prob.seed);

    Kahan value, lhs, rhs;
    for (const NormalEnergyPoint& p : bundle) {
        const double kap = kappa_at(p, *prob.amplitude, *prob.profile, d, n);
        const double kw = kap * p.weight;
        res.rays += 1;
        if (kw == 0.0) {
            rhs.add(0.0);
            if (with_diagnostics)
                res.diagnostics.push_back({p.z, p.xi, 0.0, 0.0, 0.0, 0.0, true});
            continue;
        }
        const RayIntegral ray = trace_ray(q, prob, p, want_liouville);
        value.add(kw * ray.time_integral);
        if (want_liouville) {
            lhs.add(kw * ray.liouville_integral);
            rhs.add(kw * q.value(p.z, p.xi));
        }
        res.refine += std::abs(kw) * ray.refine_gap;
        res.tails += std::abs(kw) * ray.tail_bound;
        res.max_energy_drift = std::max(res.max_energy_drift, ray.max_energy_drift);
        if (!ray.conclusive) {
            res.inconclusive += 1;
            res.inconclusive_bound += std::abs(kw) * ray.tail_bound;
        }
        if (with_diagnostics)
            res.diagnostics.push_back({p.z, p.xi, kw, ray.escape_time, ray.damping_end,
                                       kw * ray.time_integral, ray.conclusive});
    }
    res.value = value.sum;
    res.liouville_lhs = lhs.sum;
    res.rhs = rhs.sum;
    return res;
}

BundleBudget halved(const BundleBudget& b) {
    BundleBudget out = b;
    out.chart_nodes_per_dim = std::max(2, b.chart_nodes_per_dim / 2);
    out.fiber_nodes = std::max(2, b.fiber_nodes / 2);
    return out;
}

} // namespace

MeasureEvaluation evaluate_measure(const Symbol& q, const RayProblem& prob,
                                   bool with_diagnostics) {
    require(q.x_support.has_value(), ErrorKind::precondition,
            "evaluate_measure: symbol must be compactly supported in x");
    MeasureEvaluation ev;
    ev.q_id = q.id;
    EnsembleResult full = run_ensemble(q, prob, prob.bundle, false, with_diagnostics);
    const EnsembleResult coarse = run_ensemble(q, prob, halved(prob.bundle), false, false);
    ev.value = full.value;
    ev.error_estimate = std::abs(full.value - coarse.value) + full.refine + full.tails;
    ev.inconclusive_bound = full.inconclusive_bound;
    ev.rays = full.rays;
    ev.inconclusive_rays = full.inconclusive;
    ev.max_energy_drift = full.max_energy_drift;
    ev.diagnostics = std::move(full.diagnostics);
    return ev;
}

LiouvilleResult liouville_residual(const Symbol& q, const RayProblem& prob) {
    require(q.x_support.has_value(), ErrorKind::precondition,
            "liouville_residual: symbol must be compactly supported in x");
    const EnsembleResult full = run_ensemble(q, prob, prob.bundle, true, false);
    require(full.inconclusive == 0, ErrorKind::precondition,
            "liouville_residual: rays must escape the symbol support within the horizon");
    LiouvilleResult out;
    out.lhs = full.liouville_lhs;
    out.rhs = full.rhs;
    out.residual = out.lhs - out.rhs;
    return out;
}

TruncationComparison truncation_compare(const Symbol& q, const RayProblem& prob, double R,
                                        double R0, double r_ball) {
    require(R >= R0 && R0 > 0.0, ErrorKind::precondition, "truncation_compare: need R >= R0 > 0");
    const int d = prob.gamma->manifold_dim();
    const int n = prob.gamma->ambient_dim();
    const Amplitude a_r = truncate_amplitude(*prob.gamma, *prob.amplitude, R);
    const Amplitude a_r0 = truncate_amplitude(*prob.gamma, *prob.amplitude, R0);

    const auto bundle =
        sample_energy_normal_bundle(*prob.gamma, prob.potentials->V1, prob.E0, prob.bundle, prob.seed);

    TruncationComparison out;
    out.min_annulus_radius = 1e300;
    Kahan v_r, v_r0;
    for (const NormalEnergyPoint& p : bundle) {
        const double k_r = kappa_at(p, a_r, *prob.profile, d, n);
        const double k_r0 = kappa_at(p, a_r0, *prob.profile, d, n);
        if (k_r == 0.0 && k_r0 == 0.0) continue;
        const RayIntegral ray = trace_ray(q, prob, p, false);
        v_r.add(k_r * p.weight * ray.time_integral);
        v_r0.add(k_r0 * p.weight * ray.time_integral);
        if (k_r != k_r0) {
            // annulus ray: must never enter B_x(r_ball)
            out.min_annulus_radius = std::min(out.min_annulus_radius, ray.min_radius);
            if (ray.min_radius < r_ball) out.uncertified_rays += 1;
        }
    }
    out.value_truncated_r = v_r.sum;
    out.value_truncated_r0 = v_r0.sum;
    out.difference = out.value_truncated_r - out.value_truncated_r0;
    return out;
}

} // namespace semilab
