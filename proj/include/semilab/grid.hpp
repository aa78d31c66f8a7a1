#pragma once

// Uniform n-dimensional complex grids (n = 1 or 2 in production, small n in
// tests). Fields are periodic for all transform purposes; physical content is
// expected to decay before the box edge.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "semilab/errors.hpp"
#include "semilab/vec.hpp"

namespace semilab {

using Complex = std::complex<double>;

struct GridSpec {
    int n = 0;                  // ambient dimension
    std::vector<int> dims;      // points per axis
    Vec spacing;                // per-axis step
    Vec origin;                 // coordinate of index (0,...,0)

    std::size_t size() const {
        std::size_t s = 1;
        for (int d : dims) s *= static_cast<std::size_t>(d);
        return s;
    }
    double axis_length(int a) const { return dims[a] * spacing[a]; }
    double coord(int a, int idx) const { return origin[a] + idx * spacing[a]; }

    // Physical angular wavenumber of DFT index j on axis a (standard wrap).
    double wavenumber(int a, int j) const {
        const int N = dims[a];
        const int jj = (j <= N / 2 - 1 + (N % 2)) ? j : j - N;
        return 2.0 * M_PI * jj / axis_length(a);
    }

    // Centered box covering the given half-widths, spacing from h (spacing = h/points_per_h).
    static GridSpec centered(int n, double half_width, double h, int points_per_h = 4);
};

struct GridField {
    GridSpec spec;
    double h = 0.0;             // semiclassical parameter the field belongs to
    std::vector<Complex> data;  // row-major, last axis fastest

    GridField() = default;
    GridField(GridSpec s, double h_) : spec(std::move(s)), h(h_), data(spec.size(), Complex(0.0, 0.0)) {}

    Complex& at(std::size_t flat) { return data[flat]; }
    const Complex& at(std::size_t flat) const { return data[flat]; }
};

// spacing <= h/4 on every axis (with a round-off slack); throws resolution error.
void check_resolves(const GridSpec& spec, double h);

// ||u||_{L^2} with the grid measure.
double l2_norm(const GridField& u);

// max |u| over the grid.
double max_abs(const GridField& u);

// max |u| over the boundary faces of the grid box.
double edge_max_abs(const GridField& u);

// Multi-index <-> flat helpers.
std::size_t flat_index(const GridSpec& spec, const std::vector<int>& idx);
void unflatten(const GridSpec& spec, std::size_t flat, std::vector<int>& idx);

// Binary dump: little-endian header (u32 n | u64 dims[n] | f64 spacing[n]
// | f64 origin[n] | f64 h) followed by interleaved re/im doubles.
void write_field(const GridField& u, const std::string& path);
GridField read_field(const std::string& path);

} // namespace semilab
