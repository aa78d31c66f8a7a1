#include "semilab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace semilab {

GridSpec GridSpec::centered(int n, double half_width, double h, int points_per_h) {
    GridSpec s;
    s.n = n;
    const double dx = h / points_per_h;
    int N = static_cast<int>(std::ceil(2.0 * half_width / dx));
    if (N % 2 != 0) ++N;
    s.dims.assign(n, N);
    s.spacing.assign(n, dx);
    s.origin.assign(n, -0.5 * N * dx);
    return s;
}

void check_resolves(const GridSpec& spec, double h) {
    require(h > 0.0 && h <= 1.0, ErrorKind::precondition, "h must lie in (0, 1]");
    for (int a = 0; a < spec.n; ++a) {
        if (spec.spacing[a] > h / 4.0 * (1.0 + 1e-12))
            fail(ErrorKind::resolution,
                 "grid too coarse for h: spacing " + std::to_string(spec.spacing[a]) +
                     " exceeds h/4 = " + std::to_string(h / 4.0) + " on axis " + std::to_string(a));
    }
}

double l2_norm(const GridField& u) {
    double cell = 1.0;
    for (int a = 0; a < u.spec.n; ++a) cell *= u.spec.spacing[a];
    Kahan acc;
    for (const Complex& v : u.data) acc.add(std::norm(v));
    return std::sqrt(acc.sum * cell);
}

double max_abs(const GridField& u) {
    double m = 0.0;
    for (const Complex& v : u.data) m = std::max(m, std::abs(v));
    return m;
}

std::size_t flat_index(const GridSpec& spec, const std::vector<int>& idx) {
    std::size_t f = 0;
    for (int a = 0; a < spec.n; ++a) f = f * spec.dims[a] + static_cast<std::size_t>(idx[a]);
    return f;
}

void unflatten(const GridSpec& spec, std::size_t flat, std::vector<int>& idx) {
    idx.resize(spec.n);
    for (int a = spec.n - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % spec.dims[a]);
        flat /= spec.dims[a];
    }
}

double edge_max_abs(const GridField& u) {
    double m = 0.0;
    std::vector<int> idx;
    for (std::size_t f = 0; f < u.data.size(); ++f) {
        unflatten(u.spec, f, idx);
        bool edge = false;
        for (int a = 0; a < u.spec.n; ++a)
            if (idx[a] == 0 || idx[a] == u.spec.dims[a] - 1) edge = true;
        if (edge) m = std::max(m, std::abs(u.data[f]));
    }
    return m;
}

void write_field(const GridField& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::io, "cannot open " + path + " for writing");
    const std::uint32_t n = static_cast<std::uint32_t>(u.spec.n);
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (int a = 0; a < u.spec.n; ++a) {
        const std::uint64_t d = static_cast<std::uint64_t>(u.spec.dims[a]);
        out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    }
    out.write(reinterpret_cast<const char*>(u.spec.spacing.data()), u.spec.n * sizeof(double));
    out.write(reinterpret_cast<const char*>(u.spec.origin.data()), u.spec.n * sizeof(double));
    out.write(reinterpret_cast<const char*>(&u.h), sizeof(double));
    for (const Complex& v : u.data) {
        const double re = v.real(), im = v.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    require(out.good(), ErrorKind::io, "write failed for " + path);
}

GridField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::io, "cannot open " + path);
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    require(in.good() && n >= 1 && n <= 8, ErrorKind::io, "bad field header in " + path);
    GridSpec spec;
    spec.n = static_cast<int>(n);
    spec.dims.resize(spec.n);
    for (int a = 0; a < spec.n; ++a) {
        std::uint64_t d = 0;
        in.read(reinterpret_cast<char*>(&d), sizeof(d));
        spec.dims[a] = static_cast<int>(d);
    }
    spec.spacing.resize(spec.n);
    spec.origin.resize(spec.n);
    in.read(reinterpret_cast<char*>(spec.spacing.data()), spec.n * sizeof(double));
    in.read(reinterpret_cast<char*>(spec.origin.data()), spec.n * sizeof(double));
    double h = 0.0;
    in.read(reinterpret_cast<char*>(&h), sizeof(double));
    GridField u(spec, h);
    for (Complex& v : u.data) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        v = Complex(re, im);
    }
    require(in.good(), ErrorKind::io, "truncated field file " + path);
    return u;
}

} // namespace semilab
