#pragma once

// The concentrating source S_h(x) = h^{(1-n-d)/2} int_Gamma A(z) S((x-z)/h) dsigma(z),
// its radial truncation A_R, and weighted-norm diagnostics.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semilab/geometry.hpp"
#include "semilab/grid.hpp"
#include "semilab/vec.hpp"

namespace semilab {

// Amplitude on Gamma, addressed through chart coordinates.
struct Amplitude {
    std::function<double(std::span<const double> u)> value;
    // gradient in chart coordinates (size d); closed form for registry kinds
    std::function<void(std::span<const double> u, std::span<double> du)> derivative;
    double delta = 0.6; // decay weight > 1/2
    std::string kind;
};

// registry kinds: "constant" (value = param1), "gaussian" (exp(-|u|^2/param1^2)),
// "inverse_poly" ((1+|u|^2)^{-param1})
Amplitude make_amplitude(const std::string& kind, double param1, double delta);

// Schwartz profile S with its Fourier transform under the fixed convention
// S^(xi) = int e^{-i<x,xi>} S(x) dx.
struct Profile {
    std::function<double(std::span<const double> x)> value;
    std::function<double(std::span<const double> xi)> fourier;
    double support_radius = 0.0; // values are treated as 0 beyond this radius
    std::string kind;
    int dim = 0;
};

Profile make_gaussian_profile(int n);                 // S = exp(-|x|^2/2), closed-form transform
Profile make_bump_profile(int n, double radius = 1.0); // compactly supported mollifier

// Chart quadrature assembly; exact pointwise evaluation when d = 0.
// Requires spacing <= h/4 (resolution error otherwise).
GridField assemble_source(const Submanifold& gamma, const Amplitude& A, const Profile& S, double h,
                          const GridSpec& grid);

// A_R(z) = A(z) Theta(z/R) with the C^2 radial plateau (1 on B(0,1), 0 outside B(0,2)).
Amplitude truncate_amplitude(const Submanifold& gamma, const Amplitude& A, double R);

// (sum <x>^{2 delta} |u|^2 dx)^{1/2} on the grid.
double weighted_norm(const GridField& u, double delta);

struct NormScaling {
    bool skipped = false;     // all norms vanished (e.g. A == 0)
    double exponent = 0.0;    // least-squares slope of log||S_h|| vs log h
    std::vector<double> norms;
    std::string summary;
};

// Computes ||S_h||_{L^{2,delta}} over a geometric h-list (>= 4 values) and fits
// the scaling exponent. The grid for each h covers `box_halfwidth` at spacing h/4.
NormScaling source_norm_scaling(const Submanifold& gamma, const Amplitude& A, const Profile& S,
                                const std::vector<double>& h_list, double box_halfwidth);

struct AmplitudeDecayReport {
    double integral = 0.0;      // chart-budget value of the hyp integrand
    double local_fit_c = 0.0;   // fitted c with local integrals <= c r^d
    bool finite = true;
    std::string summary;
};

// Report-only validator of the amplitude decay hypothesis: global integrand
// int <z>^delta (|A| + |dA| + |A| |II|) dsigma plus a sampled local r^d fit.
AmplitudeDecayReport check_amplitude_decay(const Submanifold& gamma, const Amplitude& A,
                                           int chart_nodes_per_dim, std::uint64_t seed);

} // namespace semilab
