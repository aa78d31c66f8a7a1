#pragma once

// Phase-space symbols q(x, xi). Production symbols are finite sums of
// separable terms a(x) b(xi) with closed-form gradients; that structure is
// what the fast quantization paths consume.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semilab/geometry.hpp" // Box
#include "semilab/vec.hpp"

namespace semilab {

enum class SymbolClass { compactly_supported, bounded_with_derivatives, weighted };

struct SeparableTerm {
    std::function<double(std::span<const double>)> a; // x factor
    std::function<double(std::span<const double>)> b; // xi factor
    std::optional<Box> xbox;  // support box of a (nullopt = unbounded)
    std::optional<Box> xibox; // support box of b
};

struct Symbol {
    std::string id;
    int dim = 0; // ambient dimension n
    SymbolClass tag = SymbolClass::compactly_supported;

    std::function<double(std::span<const double>, std::span<const double>)> val;
    // closed-form gradient; when absent, gradient() falls back to central FD
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>,
                       std::span<double>)>
        grad;

    std::optional<Box> x_support;  // declared bounding box in x
    std::optional<Box> xi_support; // declared bounding box in xi
    std::vector<SeparableTerm> terms;
    bool x_only = false;
    bool xi_only = false;
    double sup_bound = 1.0; // bound on |q| used for tail estimates

    double value(std::span<const double> x, std::span<const double> xi) const;
    void gradient(std::span<const double> x, std::span<const double> xi, std::span<double> gx,
                  std::span<double> gxi) const;
    bool separable() const { return !terms.empty(); }

    // true when the point lies outside the declared x-support box
    bool outside_x_support(std::span<const double> x) const;
};

// C-infinity mollifier profile: exp(1 - 1/(1 - s^2)) on |s| < 1, 0 outside.
double bump_profile(double s);
double bump_profile_derivative(double s);

// Smooth C^2 radial plateau: 1 on [0,1], quintic-smoothstep down to 0 on [1,2].
double plateau_theta(double s);

struct SymbolParams {
    std::string kind;       // "xbump" | "shell" | "ball" | "xionly_shell" | ...
    Vec x_center;           // x bump center
    double x_radius = 1.0;  // x bump radius
    Vec xi_center;          // ball kind: xi bump center
    double xi_radius = 0.5; // ball kind
    double shell_rho = 1.0; // shell kind: center |xi|
    double shell_width = 0.3;
    double amplitude = 1.0;
};

// Builds a registry symbol with closed-form gradients in ambient dimension n.
Symbol make_symbol(int n, const std::string& id, const SymbolParams& params);

// max over the sampled product support of <x,xi> + sigma |x||xi| (<= 0 means
// the support lies in the incoming zone Z_-(R, 0, -sigma) provided |x| >= R).
struct ZoneContainment {
    bool inside = false;
    double worst_alignment = 0.0;
    double min_radius = 0.0;
};
ZoneContainment check_zone_containment(const Symbol& q, double R, double sigma, int samples = 24);

} // namespace semilab
