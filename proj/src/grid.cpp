#include "gcflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

extern "C" void dstev_(const char* jobz, const int* n, double* d, double* e,
                       double* z, const int* ldz, double* work, int* info);

namespace gcflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss nodes/weights for the weight (1-t^2)^alpha on (-1,1) via
// Golub-Welsch on the symmetric Jacobi recurrence. The diagonal is zero;
// the off-diagonal entries follow from the three-term recurrence of the
// (monic) Gegenbauer polynomials.
void gauss_gegenbauer(int n_nodes, double alpha, std::vector<double>& t,
                      std::vector<double>& w) {
    std::vector<double> diag(n_nodes, 0.0), off(std::max(0, n_nodes - 1));
    for (int k = 1; k < n_nodes; ++k) {
        const double num = k * (k + 2.0 * alpha);
        const double den = (2.0 * k + 2.0 * alpha) * (2.0 * k + 2.0 * alpha) - 1.0;
        off[k - 1] = std::sqrt(num / den);
    }
    std::vector<double> z(static_cast<std::size_t>(n_nodes) * n_nodes);
    std::vector<double> work(std::max(1, 2 * n_nodes - 2));
    int info = 0;
    const int ldz = n_nodes;
    dstev_("V", &n_nodes, diag.data(), off.data(), z.data(), &ldz, work.data(), &info);
    if (info != 0)
        throw std::runtime_error("gauss_gegenbauer: eigensolve failed, info=" +
                                 std::to_string(info));

    // total weight of (1-t^2)^alpha over (-1,1)
    const double mu0 = std::sqrt(kPi) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);
    t.assign(n_nodes, 0.0);
    w.assign(n_nodes, 0.0);
    for (int j = 0; j < n_nodes; ++j) {
        t[j] = diag[j]; // ascending eigenvalues
        const double z0 = z[static_cast<std::size_t>(j) * ldz];
        w[j] = mu0 * z0 * z0;
    }

    // Enforce the exact +/- pairing the analytic rule has; dstev is only
    // symmetric to roundoff and the antipodal node pairing must be exact.
    for (int j = 0; j < n_nodes / 2; ++j) {
        const int jr = n_nodes - 1 - j;
        const double tm = 0.5 * (t[jr] - t[j]);
        t[j] = -tm;
        t[jr] = tm;
        const double wm = 0.5 * (w[j] + w[jr]);
        w[j] = wm;
        w[jr] = wm;
    }
    if (n_nodes % 2 == 1)
        t[n_nodes / 2] = 0.0;
}

// Barycentric weights for the node set, rescaled factor-by-factor to stay in
// floating range (only ratios enter the interpolation and differentiation
// formulas, so a uniform scale is immaterial).
std::vector<double> barycentric_weights(const std::vector<double>& t) {
    const int n = static_cast<int>(t.size());
    std::vector<double> lam(n, 1.0);
    for (int j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            prod *= 2.0 * (t[j] - t[k]);
        }
        lam[j] = 1.0 / prod;
    }
    return lam;
}

void differentiation_matrices(const std::vector<double>& t,
                              const std::vector<double>& lam,
                              std::vector<double>& d1, std::vector<double>& d2) {
    const int n = static_cast<int>(t.size());
    d1.assign(static_cast<std::size_t>(n) * n, 0.0);
    d2.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = (lam[j] / lam[i]) / (t[i] - t[j]);
            d1[static_cast<std::size_t>(i) * n + j] = v;
            rowsum += v;
        }
        d1[static_cast<std::size_t>(i) * n + i] = -rowsum; // exact zero row sum
    }
    // Welfert's recursion for the second-derivative matrix.
    for (int i = 0; i < n; ++i) {
        const double dii = d1[static_cast<std::size_t>(i) * n + i];
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = 2.0 * d1[static_cast<std::size_t>(i) * n + j] *
                             (dii - 1.0 / (t[i] - t[j]));
            d2[static_cast<std::size_t>(i) * n + j] = v;
            rowsum += v;
        }
        d2[static_cast<std::size_t>(i) * n + i] = -rowsum;
    }
}

void finish_theta_arrays(GridDescriptor& g, std::vector<double> t_asc,
                         std::vector<double> w_asc) {
    // store with theta ascending (t descending)
    std::reverse(t_asc.begin(), t_asc.end());
    std::reverse(w_asc.begin(), w_asc.end());
    g.t = std::move(t_asc);
    g.theta.resize(g.n_theta);
    g.s.resize(g.n_theta);
    for (int k = 0; k < g.n_theta; ++k) {
        g.theta[k] = std::acos(g.t[k]);
        g.s[k] = std::sqrt((1.0 - g.t[k]) * (1.0 + g.t[k]));
    }
    g.bary = barycentric_weights(g.t);
    differentiation_matrices(g.t, g.bary, g.Dt, g.Dtt);
    g.weights = std::move(w_asc);
}

} // namespace

double sphere_surface_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    gauss_gegenbauer(n, 0.0, nodes, weights);
}

GridDescriptor build_axisymmetric_grid(int n, int n_nodes) {
    if (n < 2)
        throw std::invalid_argument("build_axisymmetric_grid: require n >= 2");
    if (n_nodes < 8)
        throw std::invalid_argument("build_axisymmetric_grid: require N >= 8");
    if (n_nodes > 4096)
        throw std::invalid_argument("build_axisymmetric_grid: N too large");

    GridDescriptor g;
    g.mode = GridMode::axisymmetric;
    g.n = n;
    g.n_theta = n_nodes;
    g.n_phi = 0;
    g.node_count = n_nodes;
    g.surface_area = sphere_surface_area(n);

    std::vector<double> t, w;
    gauss_gegenbauer(n_nodes, 0.5 * (n - 2), t, w);
    const double equator_area = sphere_surface_area(n - 1); // |S^(n-1)|
    for (double& wk : w)
        wk *= equator_area;
    finish_theta_arrays(g, std::move(t), std::move(w));

    g.antipode.resize(g.node_count);
    for (int k = 0; k < g.node_count; ++k)
        g.antipode[k] = g.node_count - 1 - k;
    return g;
}

GridDescriptor build_full2d_grid(int n_theta, int n_phi) {
    if (n_theta < 8 || n_phi < 8)
        throw std::invalid_argument("build_full2d_grid: require N_theta >= 8 and N_phi >= 8");
    if (n_phi % 2 != 0)
        throw std::invalid_argument("build_full2d_grid: N_phi must be even");
    if (n_theta > 1024 || n_phi > 1024)
        throw std::invalid_argument("build_full2d_grid: grid too large");

    GridDescriptor g;
    g.mode = GridMode::full2d;
    g.n = 2;
    g.n_theta = n_theta;
    g.n_phi = n_phi;
    g.node_count = n_theta * n_phi;
    g.surface_area = sphere_surface_area(2);

    std::vector<double> t, w;
    gauss_gegenbauer(n_theta, 0.0, t, w); // Gauss-Legendre
    finish_theta_arrays(g, std::move(t), std::move(w));

    g.phi.resize(n_phi);
    for (int j = 0; j < n_phi; ++j)
        g.phi[j] = 2.0 * kPi * j / n_phi;
    // node directions use tables with the antipodal sign structure exact
    g.cos_phi.resize(n_phi);
    g.sin_phi.resize(n_phi);
    for (int j = 0; j < n_phi / 2; ++j) {
        g.cos_phi[j] = std::cos(g.phi[j]);
        g.sin_phi[j] = std::sin(g.phi[j]);
        g.cos_phi[j + n_phi / 2] = -g.cos_phi[j];
        g.sin_phi[j + n_phi / 2] = -g.sin_phi[j];
    }

    // tensor weights: theta weight times trapezoidal 2*pi/n_phi
    std::vector<double> wt = std::move(g.weights);
    g.weights.assign(g.node_count, 0.0);
    const double wphi = 2.0 * kPi / n_phi;
    for (int k = 0; k < n_theta; ++k)
        for (int j = 0; j < n_phi; ++j)
            g.weights[static_cast<std::size_t>(k) * n_phi + j] = wt[k] * wphi;

    // real trig transform matrices
    const int m_count = n_phi / 2 + 1;
    g.n_modes = m_count;
    g.fwd_cos.assign(static_cast<std::size_t>(n_phi) * m_count, 0.0);
    g.fwd_sin.assign(static_cast<std::size_t>(n_phi) * m_count, 0.0);
    g.inv_cos.assign(static_cast<std::size_t>(m_count) * n_phi, 0.0);
    g.inv_sin.assign(static_cast<std::size_t>(m_count) * n_phi, 0.0);
    for (int m = 0; m < m_count; ++m) {
        const double scale = (m == 0 || m == n_phi / 2) ? 1.0 / n_phi : 2.0 / n_phi;
        for (int j = 0; j < n_phi; ++j) {
            const double c = std::cos(m * g.phi[j]);
            const double sn = std::sin(m * g.phi[j]);
            g.fwd_cos[static_cast<std::size_t>(j) * m_count + m] = scale * c;
            g.fwd_sin[static_cast<std::size_t>(j) * m_count + m] = scale * sn;
            g.inv_cos[static_cast<std::size_t>(m) * n_phi + j] = c;
            g.inv_sin[static_cast<std::size_t>(m) * n_phi + j] = sn;
        }
    }

    // latitude-dependent mode cutoff (smooth fields carry content only up to
    // m ~ sin(theta) * l_max; factor 2 keeps a safety band)
    g.mode_cut.resize(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        const int cut = static_cast<int>(std::ceil(2.0 * g.s[k] * (n_phi / 2)));
        g.mode_cut[k] = std::min(m_count - 1, std::max(6, cut));
    }

    g.antipode.resize(g.node_count);
    for (int k = 0; k < n_theta; ++k)
        for (int j = 0; j < n_phi; ++j)
            g.antipode[static_cast<std::size_t>(k) * n_phi + j] =
                (n_theta - 1 - k) * n_phi + (j + n_phi / 2) % n_phi;
    return g;
}

void GridDescriptor::node_direction(int k, std::span<double> out) const {
    const int d = dim();
    for (int i = 0; i < d; ++i)
        out[i] = 0.0;
    if (mode == GridMode::axisymmetric) {
        out[0] = s[k];
        out[d - 1] = t[k];
    } else {
        const int row = theta_row(k), col = phi_col(k);
        out[0] = s[row] * cos_phi[col];
        out[1] = s[row] * sin_phi[col];
        out[2] = t[row];
    }
}

double GridDescriptor::min_spacing() const {
    double h = theta[0]; // distance from the (excluded) pole counts
    for (int k = 0; k + 1 < n_theta; ++k)
        h = std::min(h, theta[k + 1] - theta[k]);
    if (mode == GridMode::full2d)
        h = std::min(h, kPi / n_phi); // effective filtered phi resolution
    return h;
}

namespace {

void derivatives_axisymmetric(const GridDescriptor& g, std::span<const double> u,
                              kernels::Exec exec, DerivativeBundle& out) {
    const int n = g.n_theta;
    std::vector<double> ut(n), utt(n);
    kernels::matvec(exec, g.Dt, u, ut, n, n);
    kernels::matvec(exec, g.Dtt, u, utt, n, n);
    out.du1.resize(n);
    out.h11.resize(n);
    out.h22.resize(n);
    out.du2.assign(n, 0.0);
    out.h12.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double s = g.s[k], t = g.t[k];
        out.du1[k] = -s * ut[k];              // u'(theta)
        out.h11[k] = s * s * utt[k] - t * ut[k]; // u''(theta)
        out.h22[k] = -t * ut[k];              // u'(theta) cot(theta)
    }
}

void derivatives_full2d(const GridDescriptor& g, std::span<const double> u,
                        kernels::Exec exec, DerivativeBundle& out) {
    const int nt = g.n_theta, np = g.n_phi, m_count = g.n_modes;
    const std::size_t amps = static_cast<std::size_t>(nt) * m_count;

    // forward transform and per-parity reduction: va = A / s^(m mod 2)
    std::vector<double> va(amps), vb(amps);
    kernels::matmul(exec, u, g.fwd_cos, va, nt, np, m_count);
    kernels::matmul(exec, u, g.fwd_sin, vb, nt, np, m_count);
    kernels::parallel_for(exec, static_cast<std::size_t>(nt), [&](std::size_t k) {
        const double inv_s = 1.0 / g.s[k];
        const int cut = g.mode_cut[k];
        double* ak = va.data() + k * m_count;
        double* bk = vb.data() + k * m_count;
        for (int m = 0; m < m_count; ++m) {
            if (m > cut) {
                ak[m] = 0.0;
                bk[m] = 0.0;
            } else if (m & 1) {
                ak[m] *= inv_s;
                bk[m] *= inv_s;
            }
        }
    });

    std::vector<double> vat(amps), vbt(amps), vatt(amps), vbtt(amps);
    kernels::matmul(exec, g.Dt, va, vat, nt, nt, m_count);
    kernels::matmul(exec, g.Dt, vb, vbt, nt, nt, m_count);
    kernels::matmul(exec, g.Dtt, va, vatt, nt, nt, m_count);
    kernels::matmul(exec, g.Dtt, vb, vbtt, nt, nt, m_count);

    // amplitude-space assembly of the five output fields
    std::vector<double> a_du1(amps), b_du1(amps), a_du2(amps), b_du2(amps);
    std::vector<double> a_h11(amps), b_h11(amps), a_h12(amps), b_h12(amps);
    std::vector<double> a_h22(amps), b_h22(amps);
    kernels::parallel_for(exec, static_cast<std::size_t>(nt), [&](std::size_t k) {
        const double s = g.s[k], t = g.t[k];
        const double s2 = s * s;
        for (int m = 0; m < m_count; ++m) {
            const std::size_t i = k * m_count + m;
            const double A = va[i], At = vat[i], Att = vatt[i];
            const double B = vb[i], Bt = vbt[i], Btt = vbtt[i];
            double dth_a, dth_b, dthth_a, dthth_b, h22_a, h22_b, T_a, T_b, rad_a, rad_b;
            if (m & 1) { // amplitude = s * v
                dth_a = t * A - s2 * At;
                dth_b = t * B - s2 * Bt;
                dthth_a = -s * A - 3.0 * t * s * At + s2 * s * Att;
                dthth_b = -s * B - 3.0 * t * s * Bt + s2 * s * Btt;
                const double coef = (m == 1) ? -s : (t * t - double(m) * m) / s;
                h22_a = coef * A - t * s * At;
                h22_b = coef * B - t * s * Bt;
                T_a = -s * At;
                T_b = -s * Bt;
                rad_a = m * A; // m * amplitude / s
                rad_b = m * B;
            } else { // amplitude = v
                dth_a = -s * At;
                dth_b = -s * Bt;
                dthth_a = s2 * Att - t * At;
                dthth_b = s2 * Btt - t * Bt;
                const double mm = double(m) * m;
                h22_a = -mm * A / s2 - t * At;
                h22_b = -mm * B / s2 - t * Bt;
                T_a = -At - t * A / s2;
                T_b = -Bt - t * B / s2;
                rad_a = m * A / s;
                rad_b = m * B / s;
            }
            a_du1[i] = dth_a;
            b_du1[i] = dth_b;
            a_h11[i] = dthth_a;
            b_h11[i] = dthth_b;
            a_h22[i] = h22_a;
            b_h22[i] = h22_b;
            // phi-derivative swaps the cos/sin slots: (a, b) -> (m b, -m a)
            a_du2[i] = rad_b;
            b_du2[i] = -rad_a;
            a_h12[i] = m * T_b;
            b_h12[i] = -m * T_a;
        }
    });

    const std::size_t nodes = static_cast<std::size_t>(nt) * np;
    auto inverse = [&](const std::vector<double>& a, const std::vector<double>& b,
                       std::vector<double>& field) {
        field.assign(nodes, 0.0);
        std::vector<double> tmp(nodes);
        kernels::matmul(exec, a, g.inv_cos, field, nt, m_count, np);
        kernels::matmul(exec, b, g.inv_sin, tmp, nt, m_count, np);
        kernels::parallel_for(exec, nodes, [&](std::size_t i) { field[i] += tmp[i]; });
    };
    inverse(a_du1, b_du1, out.du1);
    inverse(a_du2, b_du2, out.du2);
    inverse(a_h11, b_h11, out.h11);
    inverse(a_h12, b_h12, out.h12);
    inverse(a_h22, b_h22, out.h22);
}

} // namespace

DerivativeBundle covariant_derivatives(const GridDescriptor& grid,
                                       std::span<const double> u,
                                       kernels::Exec exec) {
    if (static_cast<int>(u.size()) != grid.node_count)
        throw std::invalid_argument("covariant_derivatives: field size does not match grid");
    DerivativeBundle out;
    if (grid.mode == GridMode::axisymmetric)
        derivatives_axisymmetric(grid, u, exec, out);
    else
        derivatives_full2d(grid, u, exec, out);
    return out;
}

double integrate(const GridDescriptor& grid, std::span<const double> field,
                 kernels::Exec exec) {
    if (static_cast<int>(field.size()) != grid.node_count)
        throw std::invalid_argument("integrate: field size does not match grid");
    for (std::size_t i = 0; i < field.size(); ++i)
        if (!std::isfinite(field[i]))
            throw std::invalid_argument("integrate: non-finite sample at node " +
                                        std::to_string(i));
    return kernels::weighted_sum(exec, grid.weights, field);
}

} // namespace gcflow
