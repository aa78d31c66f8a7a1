#pragma once

// Potential registry: sums of closed-form terms with analytic gradients.

#include <span>
#include <string>
#include <vector>

#include "semilab/vec.hpp"

namespace semilab {

struct PotentialTerm {
    enum class Kind { zero, constant, gaussian, plummer };
    Kind kind = Kind::zero;
    double amplitude = 0.0;
    Vec center;        // gaussian / plummer
    double width = 1.0; // gaussian: e^{-|x-c|^2/width^2}
    double core = 1.0;  // plummer: amplitude / sqrt(|x-c|^2 + core^2)

    double value(std::span<const double> x) const;
    void add_gradient(std::span<const double> x, std::span<double> g) const;
};

struct ScalarField {
    std::vector<PotentialTerm> terms;

    double value(std::span<const double> x) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.value(x);
        return s;
    }
    void gradient(std::span<const double> x, std::span<double> g) const {
        for (double& v : g) v = 0.0;
        for (const auto& t : terms) t.add_gradient(x, g);
    }
    bool is_zero() const;
    double sup_abs_on_grid(int n, double half_width, int samples_per_axis) const;
};

struct PotentialPair {
    ScalarField V1, V2;
    double rho = 1.0; // declared decay exponent (metadata)
    bool analytic_gradient = true;
};

// Report-only decay validation: fits the smallest constants C with
// |V1| <= C <x>^-rho and |V2| <= C <x>^-(1+rho) on a sampling grid.
struct DecayFitReport {
    double c_v1 = 0.0;
    double c_v2 = 0.0;
    double rho = 0.0;
    std::string summary;
};

DecayFitReport check_potential_decay(const PotentialPair& pots, int n, double half_width,
                                     int samples_per_axis);

} // namespace semilab
