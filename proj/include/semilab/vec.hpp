#pragma once

// Small dense vector/matrix helpers for ambient dimensions n <= 4.
// Everything here is allocation-light and deterministic.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "semilab/errors.hpp"

namespace semilab {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(double alpha, std::span<const double> a) {
    Vec r(a.begin(), a.end());
    for (double& v : r) v *= alpha;
    return r;
}

// Row-major dense matrix, sized for chart/bundle work (dims <= ~8).
struct SmallMat {
    std::size_t rows = 0, cols = 0;
    Vec a; // rows*cols

    SmallMat() = default;
    SmallMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Determinant by LU with partial pivoting. Matrix is copied.
inline double det(SmallMat m) {
    require(m.rows == m.cols, ErrorKind::precondition, "det: matrix must be square");
    const std::size_t n = m.rows;
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            d = -d;
        }
        d *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

// Solve A x = b for SPD-ish small A (used for Gram systems), Gaussian elimination
// with partial pivoting. Throws degenerate_chart on (near) singular systems.
inline Vec solve(SmallMat m, Vec b) {
    require(m.rows == m.cols && m.rows == b.size(), ErrorKind::precondition, "solve: shape mismatch");
    const std::size_t n = m.rows;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        require(std::abs(m(piv, k)) > 1e-300, ErrorKind::degenerate_chart, "solve: singular system");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
            std::swap(b[piv], b[k]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

// Compensated (Kahan) accumulator; keeps long fixed-order sums at O(eps).
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

inline double sq(double x) { return x * x; }

} // namespace semilab
