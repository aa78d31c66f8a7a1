#include "semilab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace semilab {

double hamiltonian(const PotentialPair& pots, const PhasePoint& w) {
    return dot(w.xi, w.xi) + pots.V1.value(w.x);
}

namespace {

// One leapfrog pass over [0, t_end] with n_steps. Positions advance with
// velocity 2*xi (kinetic term |xi|^2). Compensated accumulation keeps free
// flight exact to ~eps even over 1e5 steps.
struct Marcher {
    const PotentialPair& pots;
    int n;
    Vec x, xi, force;
    std::vector<Kahan> cx, cxi; // compensation state
    Kahan damping;
    double v2_prev = 0.0;

    Marcher(const PotentialPair& p, const PhasePoint& w)
        : pots(p), n(static_cast<int>(w.x.size())), x(w.x), xi(w.xi), force(n, 0.0), cx(n), cxi(n) {
        for (int i = 0; i < n; ++i) {
            cx[i].sum = x[i];
            cxi[i].sum = xi[i];
        }
        pots.V1.gradient(x, force);
        for (double& f : force) f = -f;
        v2_prev = pots.V2.value(x);
    }

    void step(double dt) {
        for (int i = 0; i < n; ++i) {
            cxi[i].add(0.5 * dt * force[i]);
            xi[i] = cxi[i].sum;
        }
        for (int i = 0; i < n; ++i) {
            cx[i].add(2.0 * dt * xi[i]);
            x[i] = cx[i].sum;
        }
        pots.V1.gradient(x, force);
        for (double& f : force) f = -f;
        for (int i = 0; i < n; ++i) {
            cxi[i].add(0.5 * dt * force[i]);
            xi[i] = cxi[i].sum;
        }
        const double v2 = pots.V2.value(x);
        damping.add(0.5 * std::abs(dt) * (v2_prev + v2) * (dt >= 0.0 ? 1.0 : -1.0));
        v2_prev = v2;
    }

    PhasePoint state() const { return {x, xi}; }
};

struct RunResult {
    std::vector<PhasePoint> states;
    std::vector<double> damping;
    double max_energy_drift = 0.0;
};

RunResult march(const PhasePoint& w, double t_end, std::size_t n_steps, std::size_t stride,
                const PotentialPair& pots) {
    RunResult out;
    Marcher m(pots, w);
    const double dt = t_end / static_cast<double>(n_steps);
    const double e0 = hamiltonian(pots, w);
    out.states.push_back(m.state());
    out.damping.push_back(0.0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        m.step(dt);
        if (k % stride == 0 || k == n_steps) {
            out.states.push_back(m.state());
            out.damping.push_back(m.damping.sum);
            out.max_energy_drift =
                std::max(out.max_energy_drift, std::abs(hamiltonian(pots, out.states.back()) - e0));
        }
    }
    return out;
}

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) s += sq(a.x[i] - b.x[i]) + sq(a.xi[i] - b.xi[i]);
    return std::sqrt(s);
}

} // namespace

Trajectory flow(const PhasePoint& w, double t_end, double tol, const PotentialPair& pots,
                const FlowOptions& opts) {
    require(w.x.size() == w.xi.size() && !w.x.empty(), ErrorKind::precondition,
            "flow: inconsistent phase point");
    Trajectory traj;
    if (t_end == 0.0) {
        traj.times = {0.0};
        traj.states = {w};
        traj.damping = {0.0};
        traj.status = TrajectoryStatus::horizon_reached;
        traj.dt_used = 0.0;
        traj.store_dt = 0.0;
        return traj;
    }

    const double span = std::abs(t_end);
    const double scale_w = 1.0 + norm2(w.x) + norm2(w.xi);
    std::size_t n_steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(span / opts.dt_init)));

    RunResult coarse = march(w, t_end, n_steps, n_steps, pots); // endpoints only
    for (int halving = 0;; ++halving) {
        require(halving < opts.max_halvings, ErrorKind::stiffness,
                "flow: step-size underflow before meeting tolerance");
        const RunResult fine = march(w, t_end, 2 * n_steps, 2 * n_steps, pots);
        const double diff = phase_distance(coarse.states.back(), fine.states.back());
        if (diff <= tol * scale_w && fine.max_energy_drift <= opts.energy_tol * scale_w) {
            n_steps *= 2;
            break;
        }
        n_steps *= 2;
        coarse = fine;
    }

    // accepted step count; re-run storing decimated states
    std::size_t stride = 1;
    while (n_steps / stride + 1 > opts.max_stored) stride *= 2;
    if (n_steps % stride != 0) n_steps = (n_steps / stride + 1) * stride;

    const RunResult run = march(w, t_end, n_steps, stride, pots);
    traj.states = run.states;
    traj.damping = run.damping;
    traj.dt_used = t_end / static_cast<double>(n_steps);
    traj.store_dt = traj.dt_used * static_cast<double>(stride);
    traj.times.resize(traj.states.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        traj.times[i] = traj.store_dt * static_cast<double>(i);
    traj.status = TrajectoryStatus::horizon_reached;
    return traj;
}

bool zone_membership(const PhasePoint& w, double R, double nu, double sigma, int sign) {
    require(sigma >= -1.0 && sigma <= 1.0, ErrorKind::precondition, "zone: sigma outside [-1,1]");
    const double xn = norm2(w.x);
    const double kn = norm2(w.xi);
    if (xn < R || kn < nu) return false;
    const double a = dot(w.x, w.xi);
    return sign > 0 ? (a >= sigma * xn * kn) : (a <= sigma * xn * kn);
}

void escape_monitor(Trajectory& traj, const PotentialPair& pots, const EscapeParams& params) {
    traj.radius_monotone_after_escape = true;
    std::size_t entry = traj.states.size();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double e = hamiltonian(pots, traj.states[i]);
        if (e < params.e1 || e > params.e2) continue;
        if (zone_membership(traj.states[i], params.radius, 0.0, -params.sigma3, +1)) {
            entry = i;
            break;
        }
    }
    if (entry == traj.states.size()) {
        traj.status = TrajectoryStatus::horizon_reached;
        return;
    }
    traj.status = TrajectoryStatus::escaped_outgoing;
    traj.escape_time = traj.times[entry];
    double prev = norm2(traj.states[entry].x);
    for (std::size_t i = entry + 1; i < traj.states.size(); ++i) {
        const double r = norm2(traj.states[i].x);
        if (r < prev * (1.0 - 1e-12)) {
            traj.radius_monotone_after_escape = false;
            break;
        }
        prev = r;
    }
}

double hp_derivative(const Symbol& q, const PhasePoint& w, const PotentialPair& pots) {
    const int n = static_cast<int>(w.x.size());
    Vec gx(n, 0.0), gxi(n, 0.0), gv(n, 0.0);
    q.gradient(w.x, w.xi, gx, gxi);
    pots.V1.gradient(w.x, gv);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += 2.0 * w.xi[i] * gx[i] - gv[i] * gxi[i];
    return s;
}

DampingReport check_damping_hypothesis(int n, double E0, double t_max, int samples,
                                       const PotentialPair& pots, double sample_halfwidth,
                                       const EscapeParams& escape, std::uint64_t seed) {
    DampingReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int tried = 0;
    while (rep.trapped + rep.escaped < samples && tried < 50 * samples) {
        ++tried;
        PhasePoint w;
        w.x.resize(n);
        w.xi.resize(n);
        for (int i = 0; i < n; ++i) w.x[i] = sample_halfwidth * unif(rng);
        const double k2 = E0 - pots.V1.value(w.x);
        if (k2 <= 0.0) continue;
        Vec dir(n);
        double dn = 0.0;
        do {
            for (int i = 0; i < n; ++i) dir[i] = unif(rng);
            dn = norm2(dir);
        } while (dn < 1e-6);
        for (int i = 0; i < n; ++i) w.xi[i] = std::sqrt(k2) * dir[i] / dn;

        Trajectory traj = flow(w, t_max, 1e-7, pots, {});
        escape_monitor(traj, pots, escape);
        if (traj.status == TrajectoryStatus::escaped_outgoing) {
            ++rep.escaped;
            continue;
        }
        ++rep.trapped;
        double best = 0.0;
        for (double d : traj.damping) best = std::max(best, d);
        rep.min_max_damping = std::min(rep.min_max_damping, best);
    }
    if (rep.trapped == 0) {
        rep.vacuous = true;
        rep.pass = true;
        rep.min_max_damping = 0.0;
    } else {
        rep.pass = rep.min_max_damping > 0.0;
    }
    std::ostringstream os;
    os << "weak-absorption heuristic (finite horizon T=" << t_max << "): " << rep.trapped
       << " trapped / " << rep.escaped << " escaped";
    if (rep.vacuous)
        os << "; no trapped samples, vacuous pass";
    else
        os << "; min over trapped of max damping = " << rep.min_max_damping << " -> "
           << (rep.pass ? "pass" : "FAIL");
    rep.summary = os.str();
    return rep;
}

} // namespace semilab
