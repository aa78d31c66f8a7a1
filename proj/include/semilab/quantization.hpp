#pragma once

// Discrete Weyl quantization on the periodic grid.
//
// The pairing <Op_h^w(q) u, u> is evaluated through the lattice Wigner
// transform with even shifts,
//
//   W(x_j, xi_k) = (2 dx / (2 pi h))^n sum_m u_{j+m} conj(u_{j-m}) e^{-2 pi i k.m/N},
//
// sampled on the momentum half-lattice xi_k = (pi h / L) k. Midpoints of two
// lattice momenta live on that half-lattice, which is exactly what the Weyl
// calculus needs; for xi-only symbols the pairing reduces to the spectral
// density on the standard lattice h * (2 pi k / L). All evaluation paths
// below (x-only, xi-only, separable, direct) compute the same functional.

#include <complex>

#include "semilab/grid.hpp"
#include "semilab/symbols.hpp"

namespace semilab {

struct PairingResult {
    Complex value{0.0, 0.0};
    double tail_bound = 0.0; // certified bound on the truncated separable tail
};

// <Op_h^w(q) u, u>. Real for real symbols up to round-off; the imaginary part
// is a discretization diagnostic. Throws resolution errors when the grid does
// not resolve u.h or the field has not decayed at the box edge.
PairingResult wigner_pairing(const Symbol& q, const GridField& u);

// Weyl action on a field. x-only symbols multiply, xi-only symbols act as the
// Fourier multiplier b(h k). Mixed separable terms use the symmetrized form
// (a(x) b(D) + b(D) a(x)) / 2, which is the exact Weyl operator for monomials
// such as x1 xi1. Symbols without a separable expansion are unsupported.
GridField weyl_apply(const Symbol& q, const GridField& u);

// Kohn-Nirenberg action: multiplier in xi, then multiplication in x.
GridField standard_apply(const Symbol& q, const GridField& u);

// <v, w> with the grid measure.
Complex field_inner(const GridField& v, const GridField& w);

} // namespace semilab
