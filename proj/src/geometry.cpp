#include "gcflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gcflow {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }
} // namespace

SupportFunction make_sphere(const GridDescriptor& grid, double radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("make_sphere: radius must be positive");
    return SupportFunction{&grid, std::vector<double>(grid.node_count, radius)};
}

SupportFunction make_ellipsoid(const GridDescriptor& grid, double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw std::invalid_argument("make_ellipsoid: semi-axes must be positive");
    SupportFunction u{&grid, std::vector<double>(grid.node_count, 0.0)};
    if (grid.mode == GridMode::axisymmetric) {
        if (grid.n != 2)
            throw std::invalid_argument("make_ellipsoid: axisymmetric ellipsoid needs n = 2");
        if (std::abs(a - b) > 1e-14 * std::max(a, b))
            throw std::invalid_argument("make_ellipsoid: axisymmetric grid needs a == b");
        for (int k = 0; k < grid.node_count; ++k) {
            const double s = grid.s[k], t = grid.t[k];
            u.values[k] = std::sqrt(a * a * s * s + c * c * t * t);
        }
    } else {
        for (int k = 0; k < grid.node_count; ++k) {
            const int r = grid.theta_row(k), col = grid.phi_col(k);
            const double x1 = grid.s[r] * grid.cos_phi[col];
            const double x2 = grid.s[r] * grid.sin_phi[col];
            const double x3 = grid.t[r];
            u.values[k] = std::sqrt(a * a * x1 * x1 + b * b * x2 * x2 + c * c * x3 * x3);
        }
    }
    return u;
}

BodyGeometry geometry_of(const SupportFunction& u, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int K = g.node_count;
    if (static_cast<int>(u.values.size()) != K)
        throw std::invalid_argument("geometry_of: value count does not match grid");
    for (int k = 0; k < K; ++k)
        if (!(u.values[k] > 0.0) || !std::isfinite(u.values[k]))
            throw std::invalid_argument("geometry_of: support function must be positive "
                                        "and finite (node " + std::to_string(k) + ")");

    BodyGeometry out;
    out.deriv = covariant_derivatives(g, u.values, exec);
    const auto& d = out.deriv;
    for (const auto* f : {&d.du1, &d.du2, &d.h11, &d.h12, &d.h22})
        for (double v : *f)
            if (!std::isfinite(v))
                throw std::invalid_argument("geometry_of: non-finite derivative");

    const int dim = g.dim();
    out.b11.resize(K);
    out.b22.resize(K);
    out.b12.assign(K, 0.0);
    out.min_eig.resize(K);
    out.sigma_n.resize(K);
    out.rho.resize(K);
    out.jac.resize(K);
    out.X.assign(static_cast<std::size_t>(K) * dim, 0.0);

    kernels::parallel_for(exec, static_cast<std::size_t>(K), [&](std::size_t k) {
        const double uk = u.values[k];
        const double b11 = d.h11[k] + uk;
        double b22 = d.h22[k] + uk;
        double b12 = 0.0, min_eig, sig;
        if (g.mode == GridMode::axisymmetric) {
            min_eig = std::min(b11, b22);
            sig = b11 * std::pow(b22, g.n - 1);
        } else {
            b12 = d.h12[k];
            const double mean = 0.5 * (b11 + b22);
            const double disc = std::sqrt(0.25 * (b11 - b22) * (b11 - b22) + b12 * b12);
            min_eig = mean - disc;
            sig = b11 * b22 - b12 * b12;
        }
        out.b11[k] = b11;
        out.b22[k] = b22;
        out.b12[k] = b12;
        out.min_eig[k] = min_eig;
        out.sigma_n[k] = sig;

        // X = u x + Du in the orthonormal frame
        double* X = out.X.data() + k * dim;
        if (g.mode == GridMode::axisymmetric) {
            const double s = g.s[k], t = g.t[k];
            X[0] = uk * s + d.du1[k] * t;
            X[dim - 1] = uk * t - d.du1[k] * s;
        } else {
            const int r = g.theta_row(static_cast<int>(k)), c = g.phi_col(static_cast<int>(k));
            const double s = g.s[r], t = g.t[r];
            const double cp = g.cos_phi[c], sp = g.sin_phi[c];
            // e1 = (t cp, t sp, -s), e2 = (-sp, cp, 0)
            X[0] = uk * s * cp + d.du1[k] * t * cp - d.du2[k] * sp;
            X[1] = uk * s * sp + d.du1[k] * t * sp + d.du2[k] * cp;
            X[2] = uk * t - d.du1[k] * s;
        }
        const double rho = std::sqrt(uk * uk + d.du1[k] * d.du1[k] + d.du2[k] * d.du2[k]);
        out.rho[k] = rho;
        out.jac[k] = uk * sig / std::pow(rho, g.n + 1);
    });

    out.convexity_margin = std::numeric_limits<double>::infinity();
    out.min_u = out.max_u = u.values[0];
    out.min_rho = out.max_rho = out.rho[0];
    for (int k = 0; k < K; ++k) {
        out.convexity_margin = std::min(out.convexity_margin, out.min_eig[k]);
        out.min_u = std::min(out.min_u, u.values[k]);
        out.max_u = std::max(out.max_u, u.values[k]);
        out.min_rho = std::min(out.min_rho, out.rho[k]);
        out.max_rho = std::max(out.max_rho, out.rho[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// SupportInterpolant
// ---------------------------------------------------------------------------

SupportInterpolant::SupportInterpolant(const SupportFunction& u, kernels::Exec exec)
    : grid_(u.grid), u_(u.values) {
    const GridDescriptor& g = *grid_;
    if (g.mode == GridMode::full2d) {
        const int nt = g.n_theta, np = g.n_phi, m_count = g.n_modes;
        const std::size_t amps = static_cast<std::size_t>(nt) * m_count;
        va_.resize(amps);
        vb_.resize(amps);
        kernels::matmul(exec, u_, g.fwd_cos, va_, nt, np, m_count);
        kernels::matmul(exec, u_, g.fwd_sin, vb_, nt, np, m_count);
        // same per-latitude mode cut as the derivative path, so interpolated
        // values and on-grid geometry describe the same field
        for (int k = 0; k < nt; ++k) {
            const int cut = g.mode_cut[k];
            for (int m = cut + 1; m < m_count; ++m) {
                va_[static_cast<std::size_t>(k) * m_count + m] = 0.0;
                vb_[static_cast<std::size_t>(k) * m_count + m] = 0.0;
            }
        }
    }
}

double SupportInterpolant::eval(double theta, double phi) const {
    const GridDescriptor& g = *grid_;
    const int nt = g.n_theta;
    const double t = std::cos(theta);
    const double s = std::sin(theta);

    // barycentric weights in t; exact node hit short-circuits
    int hit = -1;
    double wsum = 0.0;
    static thread_local std::vector<double> w;
    w.assign(nt, 0.0);
    for (int j = 0; j < nt; ++j) {
        const double dtj = t - g.t[j];
        if (std::abs(dtj) < 1e-15) {
            hit = j;
            break;
        }
        w[j] = g.bary[j] / dtj;
        wsum += w[j];
    }

    if (g.mode == GridMode::axisymmetric) {
        if (hit >= 0) return u_[hit];
        double num = 0.0;
        for (int j = 0; j < nt; ++j)
            num += w[j] * u_[j];
        return num / wsum;
    }

    const int m_count = g.n_modes;
    static thread_local std::vector<double> am, bm;
    am.assign(m_count, 0.0);
    bm.assign(m_count, 0.0);
    if (hit >= 0) {
        const double* va = va_.data() + static_cast<std::size_t>(hit) * m_count;
        const double* vb = vb_.data() + static_cast<std::size_t>(hit) * m_count;
        const double sh = g.s[hit];
        for (int m = 0; m < m_count; ++m) {
            const double f = (m & 1) ? sh : 1.0;
            am[m] = f * va[m];
            bm[m] = f * vb[m];
        }
    } else {
        for (int j = 0; j < nt; ++j) {
            const double wj = w[j];
            const double* va = va_.data() + static_cast<std::size_t>(j) * m_count;
            const double* vb = vb_.data() + static_cast<std::size_t>(j) * m_count;
            for (int m = 0; m < m_count; ++m) {
                am[m] += wj * va[m];
                bm[m] += wj * vb[m];
            }
        }
        for (int m = 0; m < m_count; ++m) {
            const double f = ((m & 1) ? s : 1.0) / wsum;
            am[m] *= f;
            bm[m] *= f;
        }
    }
    // recurrence for cos(m phi), sin(m phi)
    double val = am[0];
    const double c1 = std::cos(phi), s1 = std::sin(phi);
    double cm = 1.0, sm = 0.0;
    for (int m = 1; m < m_count; ++m) {
        const double cn = cm * c1 - sm * s1;
        const double snn = sm * c1 + cm * s1;
        cm = cn;
        sm = snn;
        val += am[m] * cm + bm[m] * sm;
    }
    return val;
}

namespace {
struct BestNode {
    int index = -1;
    double value = std::numeric_limits<double>::infinity();
};
} // namespace

double SupportInterpolant::radial_axisymmetric(double axis_angle) const {
    const GridDescriptor& g = *grid_;
    BestNode best;
    for (int k = 0; k < g.n_theta; ++k) {
        const double c = std::cos(g.theta[k] - axis_angle);
        if (c <= 1e-12) continue;
        const double v = u_[k] / c;
        if (v < best.value) best = {k, v};
    }
    if (best.index < 0)
        throw std::runtime_error("radial: no node faces the query direction");

    auto objective = [&](double th) {
        const double c = std::cos(th - axis_angle);
        if (c <= 1e-12) return std::numeric_limits<double>::infinity();
        return eval(th, 0.0) / c;
    };
    double center = g.theta[best.index];
    double r = 0.75 * std::max(g.theta[1] - g.theta[0],
                               best.index + 1 < g.n_theta
                                   ? g.theta[best.index + 1] - g.theta[best.index]
                                   : g.theta[best.index] - g.theta[best.index - 1]);
    double best_val = best.value;
    for (int it = 0; it < 7; ++it) {
        const double gm = objective(center - r), g0 = objective(center), gp = objective(center + r);
        best_val = std::min({best_val, gm, g0, gp});
        const double denom = gm - 2.0 * g0 + gp;
        double step;
        if (denom > 0.0 && std::isfinite(denom)) {
            step = -0.5 * r * (gp - gm) / denom;
            step = std::clamp(step, -1.5 * r, 1.5 * r);
        } else {
            step = (gm < gp) ? -r : r;
            if (g0 <= std::min(gm, gp)) step = 0.0;
        }
        center += step;
        r *= 0.35;
    }
    best_val = std::min(best_val, objective(center));
    return best_val;
}

double SupportInterpolant::radial_full2d(std::span<const double> xi) const {
    const GridDescriptor& g = *grid_;
    BestNode best;
    for (int k = 0; k < g.node_count; ++k) {
        const int row = g.theta_row(k), col = g.phi_col(k);
        const double c = g.s[row] * (g.cos_phi[col] * xi[0] + g.sin_phi[col] * xi[1]) +
                         g.t[row] * xi[2];
        if (c <= 1e-12) continue;
        const double v = u_[k] / c;
        if (v < best.value) best = {k, v};
    }
    if (best.index < 0)
        throw std::runtime_error("radial: no node faces the query direction");

    auto objective = [&](const double* x) {
        const double c = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
        if (c <= 1e-12) return std::numeric_limits<double>::infinity();
        const double th = std::acos(clamp1(x[2]));
        const double ph = std::atan2(x[1], x[0]);
        return eval(th, ph) / c;
    };

    const int row = g.theta_row(best.index), col = g.phi_col(best.index);
    double x0[3] = {g.s[row] * g.cos_phi[col], g.s[row] * g.sin_phi[col], g.t[row]};
    const double dtheta = (row + 1 < g.n_theta) ? g.theta[row + 1] - g.theta[row]
                                                : g.theta[row] - g.theta[row - 1];
    double r = 0.75 * std::max(dtheta, g.s[row] * 2.0 * kPi / g.n_phi);
    double best_val = best.value;

    for (int it = 0; it < 7; ++it) {
        // orthonormal tangent frame at x0
        double tau1[3];
        if (std::abs(x0[2]) < 0.9) {
            tau1[0] = -x0[1];
            tau1[1] = x0[0];
            tau1[2] = 0.0;
        } else {
            tau1[0] = 1.0 - x0[0] * x0[0];
            tau1[1] = -x0[0] * x0[1];
            tau1[2] = -x0[0] * x0[2];
        }
        double nrm = std::sqrt(tau1[0] * tau1[0] + tau1[1] * tau1[1] + tau1[2] * tau1[2]);
        for (double& v : tau1) v /= nrm;
        const double tau2[3] = {x0[1] * tau1[2] - x0[2] * tau1[1],
                                x0[2] * tau1[0] - x0[0] * tau1[2],
                                x0[0] * tau1[1] - x0[1] * tau1[0]};

        auto at = [&](double w1, double w2, double* out) {
            for (int i = 0; i < 3; ++i)
                out[i] = x0[i] + w1 * tau1[i] + w2 * tau2[i];
            const double n2 = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
            for (int i = 0; i < 3; ++i)
                out[i] /= n2;
        };
        double p[3];
        auto sample = [&](double w1, double w2) {
            at(w1, w2, p);
            return objective(p);
        };
        const double g0 = sample(0, 0);
        const double gpx = sample(r, 0), gmx = sample(-r, 0);
        const double gpy = sample(0, r), gmy = sample(0, -r);
        const double gpp = sample(r, r), gpm = sample(r, -r);
        const double gmp = sample(-r, r), gmm = sample(-r, -r);
        best_val = std::min({best_val, g0, gpx, gmx, gpy, gmy, gpp, gpm, gmp, gmm});

        const double gx = (gpx - gmx) / (2 * r), gy = (gpy - gmy) / (2 * r);
        const double hxx = (gpx - 2 * g0 + gmx) / (r * r);
        const double hyy = (gpy - 2 * g0 + gmy) / (r * r);
        const double hxy = (gpp - gpm - gmp + gmm) / (4 * r * r);
        const double det = hxx * hyy - hxy * hxy;
        double d1, d2;
        if (hxx > 0.0 && det > 0.0 && std::isfinite(det)) {
            d1 = -(hyy * gx - hxy * gy) / det;
            d2 = -(-hxy * gx + hxx * gy) / det;
            const double len = std::sqrt(d1 * d1 + d2 * d2);
            if (len > 1.5 * r) {
                d1 *= 1.5 * r / len;
                d2 *= 1.5 * r / len;
            }
        } else {
            // move towards the smallest sample
            d1 = d2 = 0.0;
            double m = g0;
            const double cand[8][3] = {{r, 0, gpx},   {-r, 0, gmx}, {0, r, gpy},
                                       {0, -r, gmy},  {r, r, gpp},  {r, -r, gpm},
                                       {-r, r, gmp},  {-r, -r, gmm}};
            for (const auto& cnd : cand)
                if (cnd[2] < m) {
                    m = cnd[2];
                    d1 = cnd[0];
                    d2 = cnd[1];
                }
        }
        at(d1, d2, p);
        x0[0] = p[0];
        x0[1] = p[1];
        x0[2] = p[2];
        r *= 0.35;
    }
    best_val = std::min(best_val, objective(x0));
    return best_val;
}

double SupportInterpolant::radial(std::span<const double> xi) const {
    const GridDescriptor& g = *grid_;
    const int dim = g.dim();
    if (static_cast<int>(xi.size()) != dim)
        throw std::invalid_argument("radial: direction dimension mismatch");
    double n2 = 0.0;
    for (double c : xi) n2 += c * c;
    if (std::abs(n2 - 1.0) > 1e-10)
        throw std::invalid_argument("radial: direction must be a unit vector");

    if (g.mode == GridMode::axisymmetric) {
        // axisymmetric bodies: rho depends on the polar angle only
        return radial_axisymmetric(std::acos(clamp1(xi[dim - 1])));
    }
    return radial_full2d(xi);
}

double radial_function_at(const SupportFunction& u, std::span<const double> xi) {
    return SupportInterpolant(u).radial(xi);
}

SupportFunction polar_dual(const SupportFunction& u, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    SupportInterpolant interp(u, exec);
    SupportFunction dual{&g, std::vector<double>(g.node_count, 0.0)};
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> xi(g.dim());
        g.node_direction(static_cast<int>(k), xi);
        dual.values[k] = 1.0 / interp.radial(xi);
    });
    for (double v : dual.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::runtime_error("polar_dual: non-positive dual support value");
    return dual;
}

JacobianReport jacobian_checks(const SupportFunction& u, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    BodyGeometry geom = geometry_of(u, exec);
    SupportInterpolant interp(u, exec);

    JacobianReport rep{};
    rep.integral = integrate(g, geom.jac, exec);
    rep.expected = g.surface_area;
    rep.integral_defect = std::abs(rep.integral - rep.expected);

    std::vector<double> defect(g.node_count, 0.0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        const int dim = g.dim();
        std::vector<double> xi(dim);
        const double* X = geom.X.data() + k * dim;
        for (int i = 0; i < dim; ++i)
            xi[i] = X[i] / geom.rho[k];
        double n2 = 0.0;
        for (double c : xi) n2 += c * c;
        const double scale = 1.0 / std::sqrt(n2);
        for (double& c : xi) c *= scale;
        // |Jac A|(xi) |Jac A*|(x) = (rho(xi) / |X(x)|)^(n+1) at matched pairs
        const double ratio = interp.radial(xi) / geom.rho[k];
        defect[k] = std::abs(std::pow(ratio, g.n + 1) - 1.0);
    });
    rep.max_product_defect = kernels::max_abs(exec, defect);
    return rep;
}

} // namespace gcflow
