#pragma once

// 1-d Gauss–Legendre rules (Newton on Legendre polynomials) and a Halton
// sequence for the rare high-codimension fiber case.

#include <cstdint>
#include <utility>
#include <vector>

namespace semilab {

struct Quad1d {
    std::vector<double> nodes;   // on [a, b]
    std::vector<double> weights; // sum = b - a
};

// n-point Gauss–Legendre rule on [a, b]. Deterministic to round-off.
Quad1d gauss_legendre(int n, double a, double b);

// Composite rule: `panels` copies of an order-`order` GL rule.
Quad1d composite_gauss_legendre(int order, int panels, double a, double b);

// Halton low-discrepancy point in [0,1)^dim for index i (1-based internally).
std::vector<double> halton_point(std::uint64_t index, int dim);

// Composite Simpson weights for m+1 uniformly spaced samples, spacing dt.
// For odd interval counts the last interval falls back to trapezoid.
std::vector<double> simpson_weights(std::size_t count, double dt);

} // namespace semilab
