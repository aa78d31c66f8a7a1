#include "semilab/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semilab/fft.hpp"

namespace semilab {

namespace {

void check_field(const GridField& u) {
    check_resolves(u.spec, u.h);
    const double peak = max_abs(u);
    if (peak == 0.0) return;
    const double edge = edge_max_abs(u);
    if (edge > 1e-8 * peak)
        fail(ErrorKind::resolution,
             "field has not decayed at the box edge (edge/peak = " + std::to_string(edge / peak) +
                 "); enlarge the box or add absorption");
}

double cell_volume(const GridSpec& g) {
    double c = 1.0;
    for (int a = 0; a < g.n; ++a) c *= g.spacing[a];
    return c;
}

// Index range of grid points inside the box (clipped); empty if disjoint.
struct IndexBox {
    std::vector<int> lo, hi; // inclusive
    bool empty = false;
};

IndexBox index_box(const GridSpec& g, const std::optional<Box>& box) {
    IndexBox ib;
    ib.lo.assign(g.n, 0);
    ib.hi.resize(g.n);
    for (int a = 0; a < g.n; ++a) ib.hi[a] = g.dims[a] - 1;
    if (!box) return ib;
    for (int a = 0; a < g.n; ++a) {
        ib.lo[a] = std::max(0, static_cast<int>(std::floor((box->lo[a] - g.origin[a]) / g.spacing[a])));
        ib.hi[a] = std::min(g.dims[a] - 1,
                            static_cast<int>(std::ceil((box->hi[a] - g.origin[a]) / g.spacing[a])));
        if (ib.lo[a] > ib.hi[a]) ib.empty = true;
    }
    return ib;
}

// xi value of the half-lattice at DFT index k (wrapped).
double half_lattice_xi(const GridSpec& g, double h, int axis, int k) {
    const int N = g.dims[axis];
    const int kk = (k <= N / 2 - 1 + (N % 2)) ? k : k - N;
    return M_PI * h * kk / g.axis_length(axis);
}

// x-only pairing: sum q(x) |u(x)|^2 dx over the declared support box.
Complex pair_x_only(const Symbol& q, const GridField& u) {
    const GridSpec& g = u.spec;
    const IndexBox ib = index_box(g, q.x_support);
    if (ib.empty) return {0.0, 0.0};
    Kahan acc;
    std::vector<int> idx(ib.lo);
    Vec x(g.n);
    const Vec xi0(g.n, 0.0);
    while (true) {
        std::size_t flat = 0;
        for (int a = 0; a < g.n; ++a) flat = flat * g.dims[a] + idx[a];
        const double a2 = std::norm(u.data[flat]);
        if (a2 != 0.0) {
            for (int a = 0; a < g.n; ++a) x[a] = g.coord(a, idx[a]);
            acc.add(q.val(x, xi0) * a2);
        }
        int a = g.n - 1;
        while (a >= 0 && ++idx[a] > ib.hi[a]) idx[a--] = ib.lo[a];
        if (a < 0) break;
    }
    return {acc.sum * cell_volume(g), 0.0};
}

// xi-only pairing: spectral density sampled at the even half-lattice points
// (2k mod N), i.e. the standard momentum lattice for resolved fields.
Complex pair_xi_only(const Symbol& q, const GridField& u) {
    const GridSpec& g = u.spec;
    std::vector<Complex> spec = u.data;
    fft_forward(spec, g.dims);
    const double factor = cell_volume(g) / static_cast<double>(g.size());
    Kahan acc;
    std::vector<int> idx;
    Vec xi(g.n);
    const Vec x0(g.n, 0.0);
    for (std::size_t f = 0; f < spec.size(); ++f) {
        const double a2 = std::norm(spec[f]);
        if (a2 == 0.0) continue;
        unflatten(g, f, idx);
        for (int a = 0; a < g.n; ++a)
            xi[a] = half_lattice_xi(g, u.h, a, (2 * idx[a]) % g.dims[a]);
        acc.add(q.val(x0, xi) * a2);
    }
    return {acc.sum * factor, 0.0};
}

// Separable fast path for one term a(x) b(xi):
//   pairing = sum_m Btilde_m A_m,
//   Btilde  = FFT(b on the half-lattice) / N^n, truncated with a certified tail,
//   A_m     = dx^n sum_j a(x_j) u_{j+m} conj(u_{j-m}).
Complex pair_separable_term(const SeparableTerm& term, const GridField& u, double& tail_bound) {
    const GridSpec& g = u.spec;
    const int n = g.n;

    std::vector<Complex> bt(g.size());
    {
        std::vector<int> idx;
        Vec xi(n);
        for (std::size_t f = 0; f < bt.size(); ++f) {
            unflatten(g, f, idx);
            for (int a = 0; a < n; ++a) xi[a] = half_lattice_xi(g, u.h, a, idx[a]);
            bt[f] = term.b(xi);
        }
        fft_forward(bt, g.dims);
        const double inv = 1.0 / static_cast<double>(g.size());
        for (Complex& v : bt) v *= inv;
    }

    // retained m set by magnitude threshold, in fixed index order
    double bmax = 0.0;
    for (const Complex& v : bt) bmax = std::max(bmax, std::abs(v));
    if (bmax == 0.0) return {0.0, 0.0};
    const double thresh = 1e-13 * bmax;
    std::vector<std::size_t> kept;
    double dropped = 0.0;
    for (std::size_t f = 0; f < bt.size(); ++f) {
        if (std::abs(bt[f]) > thresh)
            kept.push_back(f);
        else
            dropped += std::abs(bt[f]);
    }

    const IndexBox ib = index_box(g, term.xbox);
    if (ib.empty) return {0.0, 0.0};
    std::vector<std::size_t> jflat;
    std::vector<double> aval;
    double amax = 0.0;
    {
        std::vector<int> idx(ib.lo);
        Vec x(n);
        while (true) {
            for (int a = 0; a < n; ++a) x[a] = g.coord(a, idx[a]);
            const double av = term.a(x);
            if (av != 0.0) {
                std::size_t flat = 0;
                for (int a = 0; a < n; ++a) flat = flat * g.dims[a] + idx[a];
                jflat.push_back(flat);
                aval.push_back(av);
                amax = std::max(amax, std::abs(av));
            }
            int a = n - 1;
            while (a >= 0 && ++idx[a] > ib.hi[a]) idx[a--] = ib.lo[a];
            if (a < 0) break;
        }
    }
    if (jflat.empty()) return {0.0, 0.0};

    double u2 = 0.0;
    for (const Complex& v : u.data) u2 += std::norm(v);
    tail_bound += dropped * amax * u2 * cell_volume(g);

    const double dxn = cell_volume(g);
    std::vector<int> mi, ji;
    Complex total(0.0, 0.0);
    if (n == 1) {
        const int N = g.dims[0];
        for (std::size_t kf : kept) {
            const int m = static_cast<int>(kf);
            Complex am(0.0, 0.0);
            for (std::size_t t = 0; t < jflat.size(); ++t) {
                const int j = static_cast<int>(jflat[t]);
                const int jp = (j + m) % N;
                const int jm = (j - m + N) % N;
                am += aval[t] * u.data[jp] * std::conj(u.data[jm]);
            }
            total += bt[kf] * (dxn * am);
        }
    } else if (n == 2) {
        const int N0 = g.dims[0], N1 = g.dims[1];
        for (std::size_t kf : kept) {
            const int m0 = static_cast<int>(kf) / N1;
            const int m1 = static_cast<int>(kf) % N1;
            Complex am(0.0, 0.0);
            for (std::size_t t = 0; t < jflat.size(); ++t) {
                const int j0 = static_cast<int>(jflat[t]) / N1;
                const int j1 = static_cast<int>(jflat[t]) % N1;
                const int p0 = (j0 + m0) % N0, p1 = (j1 + m1) % N1;
                const int q0 = (j0 - m0 + N0) % N0, q1 = (j1 - m1 + N1) % N1;
                am += aval[t] * u.data[static_cast<std::size_t>(p0) * N1 + p1] *
                      std::conj(u.data[static_cast<std::size_t>(q0) * N1 + q1]);
            }
            total += bt[kf] * (dxn * am);
        }
    } else {
        for (std::size_t kf : kept) {
            unflatten(g, kf, mi);
            Complex am(0.0, 0.0);
            for (std::size_t t = 0; t < jflat.size(); ++t) {
                unflatten(g, jflat[t], ji);
                std::size_t fp = 0, fm = 0;
                for (int a = 0; a < n; ++a) {
                    fp = fp * g.dims[a] + (ji[a] + mi[a]) % g.dims[a];
                    fm = fm * g.dims[a] + (ji[a] - mi[a] + g.dims[a]) % g.dims[a];
                }
                am += aval[t] * u.data[fp] * std::conj(u.data[fm]);
            }
            total += bt[kf] * (dxn * am);
        }
    }
    return total;
}

// Direct evaluation for symbols without separable structure: per-x transform
// over the shift variable. O(|supp_x| N^n log N); intended for small grids.
Complex pair_direct(const Symbol& q, const GridField& u) {
    const GridSpec& g = u.spec;
    const int n = g.n;
    const IndexBox ib = index_box(g, q.x_support);
    if (ib.empty) return {0.0, 0.0};
    double factor = 1.0;
    for (int a = 0; a < n; ++a) factor *= sq(g.spacing[a]) / g.axis_length(a);

    std::vector<Complex> row(g.size());
    Complex total(0.0, 0.0);
    std::vector<int> idx(ib.lo), mi;
    Vec x(n), xi(n);
    while (true) {
        for (int a = 0; a < n; ++a) x[a] = g.coord(a, idx[a]);
        for (std::size_t fm = 0; fm < row.size(); ++fm) {
            unflatten(g, fm, mi);
            std::size_t fp = 0, fq = 0;
            for (int a = 0; a < n; ++a) {
                fp = fp * g.dims[a] + (idx[a] + mi[a]) % g.dims[a];
                fq = fq * g.dims[a] + (idx[a] - mi[a] + g.dims[a]) % g.dims[a];
            }
            row[fm] = u.data[fp] * std::conj(u.data[fq]);
        }
        fft_forward(row, g.dims);
        Complex acc(0.0, 0.0);
        for (std::size_t fk = 0; fk < row.size(); ++fk) {
            unflatten(g, fk, mi);
            for (int a = 0; a < n; ++a) xi[a] = half_lattice_xi(g, u.h, a, mi[a]);
            acc += q.val(x, xi) * row[fk];
        }
        total += acc;
        int a = n - 1;
        while (a >= 0 && ++idx[a] > ib.hi[a]) idx[a--] = ib.lo[a];
        if (a < 0) break;
    }
    return factor * total;
}

// Fourier multiplier b(h k_phys) on the standard lattice, in place.
void apply_multiplier(GridField& u, const std::function<double(std::span<const double>)>& b) {
    const GridSpec& g = u.spec;
    fft_forward(u.data, g.dims);
    std::vector<int> idx;
    Vec xi(g.n);
    for (std::size_t f = 0; f < u.data.size(); ++f) {
        unflatten(g, f, idx);
        for (int a = 0; a < g.n; ++a) xi[a] = u.h * g.wavenumber(a, idx[a]);
        u.data[f] *= b(xi);
    }
    fft_backward(u.data, g.dims);
    const double inv = 1.0 / static_cast<double>(g.size());
    for (Complex& v : u.data) v *= inv;
}

void apply_x_factor(GridField& u, const std::function<double(std::span<const double>)>& a) {
    const GridSpec& g = u.spec;
    std::vector<int> idx;
    Vec x(g.n);
    for (std::size_t f = 0; f < u.data.size(); ++f) {
        unflatten(g, f, idx);
        for (int c = 0; c < g.n; ++c) x[c] = g.coord(c, idx[c]);
        u.data[f] *= a(x);
    }
}

} // namespace

PairingResult wigner_pairing(const Symbol& q, const GridField& u) {
    check_field(u);
    PairingResult out;
    if (q.x_only) {
        out.value = pair_x_only(q, u);
        return out;
    }
    if (q.xi_only) {
        out.value = pair_xi_only(q, u);
        return out;
    }
    if (q.separable()) {
        for (const SeparableTerm& term : q.terms)
            out.value += pair_separable_term(term, u, out.tail_bound);
        return out;
    }
    out.value = pair_direct(q, u);
    return out;
}

GridField weyl_apply(const Symbol& q, const GridField& u) {
    check_resolves(u.spec, u.h);
    if (q.x_only) {
        GridField out = u;
        apply_x_factor(out, [&q](std::span<const double> x) {
            const Vec xi0(x.size(), 0.0);
            return q.val(x, xi0);
        });
        return out;
    }
    if (q.xi_only) {
        GridField out = u;
        apply_multiplier(out, [&q](std::span<const double> xi) {
            const Vec x0(xi.size(), 0.0);
            return q.val(x0, xi);
        });
        return out;
    }
    require(q.separable(), ErrorKind::unsupported_symbol,
            "weyl_apply needs a separable expansion for mixed symbols");
    GridField out(u.spec, u.h);
    for (const SeparableTerm& term : q.terms) {
        GridField t1 = u; // a(x) b(D) u
        apply_multiplier(t1, term.b);
        apply_x_factor(t1, term.a);
        GridField t2 = u; // b(D) a(x) u
        apply_x_factor(t2, term.a);
        apply_multiplier(t2, term.b);
        for (std::size_t f = 0; f < out.data.size(); ++f)
            out.data[f] += 0.5 * (t1.data[f] + t2.data[f]);
    }
    return out;
}

GridField standard_apply(const Symbol& q, const GridField& u) {
    check_resolves(u.spec, u.h);
    if (q.x_only || q.xi_only) return weyl_apply(q, u); // no ordering ambiguity
    require(q.separable(), ErrorKind::unsupported_symbol,
            "standard_apply needs a separable expansion for mixed symbols");
    GridField out(u.spec, u.h);
    for (const SeparableTerm& term : q.terms) {
        GridField t = u;
        apply_multiplier(t, term.b);
        apply_x_factor(t, term.a);
        for (std::size_t f = 0; f < out.data.size(); ++f) out.data[f] += t.data[f];
    }
    return out;
}

Complex field_inner(const GridField& v, const GridField& w) {
    require(v.data.size() == w.data.size(), ErrorKind::precondition, "field_inner: size mismatch");
    Kahan re, im;
    for (std::size_t f = 0; f < v.data.size(); ++f) {
        const Complex p = v.data[f] * std::conj(w.data[f]);
        re.add(p.real());
        im.add(p.imag());
    }
    const double cell = cell_volume(v.spec);
    return {re.sum * cell, im.sum * cell};
}

} // namespace semilab
