#pragma once

// Source submanifold Gamma: chart parametrization, tangent/normal splitting,
// second fundamental form, and quadrature on the energy-shell normal bundle
// N_E Gamma = { (z, xi) : z on Gamma, xi _|_ T_z Gamma, |xi|^2 + V1(z) = E0 }.
//
// Points on Gamma are always addressed through their chart coordinate u; no
// chart inversion is ever attempted.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semilab/potentials.hpp"
#include "semilab/vec.hpp"

namespace semilab {

struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
};

class Submanifold {
public:
    enum class Kind { point, affine, sphere_like, general_chart };

    using ChartFn = std::function<void(std::span<const double> u, std::span<double> z)>;

    static Submanifold make_point(Vec z0);
    // Affine d-plane through `origin` spanned by `directions` (orthonormalized
    // at construction), chart domain a rectangle in the span coordinates.
    static Submanifold make_affine(Vec origin, std::vector<Vec> directions, Box domain);
    // Circle of radius r in R^2, chart angle in [0, 2pi).
    static Submanifold make_circle(double radius, Vec center);
    // Sphere of radius r in R^3, chart (polar, azimuth) in (0,pi) x [0, 2pi).
    static Submanifold make_sphere(double radius, Vec center);
    // General chart with optional analytic derivatives (finite differences otherwise).
    static Submanifold make_general(int ambient_dim, int manifold_dim, Box domain, ChartFn chart);

    int ambient_dim() const { return n_; }
    int manifold_dim() const { return d_; }
    Kind kind() const { return kind_; }
    const Box& chart_domain() const { return domain_; }

    void chart(std::span<const double> u, std::span<double> z) const;
    Vec chart_point(std::span<const double> u) const;

    // J(u): n x d matrix of chart partials. Throws degenerate_chart if the
    // numerical rank drops below d.
    SmallMat jacobian(std::span<const double> u) const;

    // Chart Hessian: H[a*d+b] is the n-vector d^2 z / du_a du_b.
    std::vector<Vec> hessian(std::span<const double> u) const;

    // sqrt(det J^T J): density of sigma_Gamma against du.
    double chart_density(std::span<const double> u) const;

    // Orthonormal basis of N_z Gamma obtained by fixed-order Gram-Schmidt of
    // the canonical basis against T_z Gamma. Deterministic; smooth only
    // locally, so bundle quadrature re-anchors it per node.
    std::vector<Vec> normal_frame(std::span<const double> u) const;

    // Project `frame` (an orthonormal basis of the normal space at a nearby
    // anchor) onto N_z Gamma at u and re-orthonormalize. Smooth in u for small
    // displacements, which keeps finite differences of bundle charts clean.
    std::vector<Vec> transported_normal_frame(std::span<const double> u,
                                              const std::vector<Vec>& frame) const;

private:
    int n_ = 0, d_ = 0;
    Kind kind_ = Kind::point;
    Box domain_;
    Vec point_;                   // kind == point
    Vec origin_;                  // affine / circle / sphere center
    std::vector<Vec> directions_; // affine ONB
    double radius_ = 0.0;         // circle / sphere
    ChartFn chart_fn_;            // general
};

struct TangentSplit {
    Vec tangential, normal;
};

// Orthogonal split xi = xi_T + xi_N against T_z Gamma at chart point u.
TangentSplit tangent_projection(const Submanifold& gamma, std::span<const double> u,
                                std::span<const double> xi);

// II_z(X, Y) for ambient tangent vectors X, Y at z(u). Throws precondition
// if X or Y has a normal component beyond tolerance.
Vec second_fundamental_form(const Submanifold& gamma, std::span<const double> u,
                            std::span<const double> X, std::span<const double> Y);

// Operator norm sup_{|X|=|Y|=1} |II(X,Y)|, sampled over tangent directions
// (exact for d = 1). Used by the amplitude decay validator.
double second_fundamental_norm(const Submanifold& gamma, std::span<const double> u);

struct NormalEnergyPoint {
    Vec u;      // chart coordinate of the base point
    Vec z;      // base point on Gamma
    Vec xi;     // normal covector with |xi|^2 + V1(z) = E0
    double weight = 0.0;
};

struct BundleBudget {
    int chart_nodes_per_dim = 32;
    int fiber_nodes = 64;
    double fd_step_rel = 1e-5; // finite-difference step for the Gram metric
};

// Quadrature sampling of (N_E Gamma, sigma_{N_E Gamma}). Weights carry the
// Gram determinant of the induced metric g((Z,Xi),(Z~,Xi~)) = <Z,Z~> +
// <Xi_perp, Xi_perp~>, with Xi_perp the projection onto (T_z Gamma + R xi)^perp.
// Deterministic given (budget, seed).
std::vector<NormalEnergyPoint> sample_energy_normal_bundle(const Submanifold& gamma,
                                                           const ScalarField& V1, double E0,
                                                           const BundleBudget& budget,
                                                           std::uint64_t seed);

struct ZoneWitness {
    Vec z, xi;
};

struct NonIncomingReport {
    bool pass = true;
    std::size_t sampled = 0;
    std::vector<ZoneWitness> witnesses; // capped
    std::string summary;
};

// Samples N Gamma for covectors (z, xi) with |z| >= R1 and
// <z, xi> <= -sigma1 |z| |xi| (report-only).
NonIncomingReport check_nonincoming(const Submanifold& gamma, double R1, double sigma1,
                                    const BundleBudget& budget);

} // namespace semilab
