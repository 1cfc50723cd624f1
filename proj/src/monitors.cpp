#include "gcflow/monitors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace gcflow {

namespace {

struct Gl15 {
    std::vector<double> x, w;
    Gl15() { gauss_legendre_rule(15, x, w); }
};
struct Gl48 {
    std::vector<double> x, w;
    Gl48() { gauss_legendre_rule(48, x, w); }
};

const Gl15& gl15() {
    static const Gl15 rule;
    return rule;
}
const Gl48& gl48() {
    static const Gl48 rule;
    return rule;
}

// signed fixed-order integral; b < a yields the negative of the reverse
double gl48_integral(const std::function<double(double)>& f, double a, double b) {
    const auto& rule = gl48();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    if (half == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * f(mid + half * rule.x[i]);
    return acc * half;
}

double gl15_panel(const std::function<double(double)>& f, double a, double b) {
    const auto& rule = gl15();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * f(mid + half * rule.x[i]);
    return acc * half;
}

double adaptive_panel(const std::function<double(double)>& f, double a, double b,
                      double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl15_panel(f, a, mid);
    const double right = gl15_panel(f, mid, b);
    const double diff = std::abs(left + right - whole);
    if (diff <= tol)
        return left + right;
    if (depth >= 500) {
        // integrable endpoint singularities shrink to nothing by this depth;
        // anything still large cannot converge
        if (std::abs(left + right) > 1e3 * tol)
            throw std::runtime_error("adaptive_radial_integral: divergent inner integral");
        return left + right;
    }
    return adaptive_panel(f, a, mid, left, tol, depth + 1) +
           adaptive_panel(f, mid, b, right, tol, depth + 1);
}

} // namespace

double adaptive_radial_integral(const std::function<double(double)>& f, double a,
                                double b, double tol) {
    if (a == b) return 0.0;
    const double sign = (b >= a) ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double whole = gl15_panel(f, lo, hi);
    return sign * adaptive_panel(f, lo, hi, whole, tol, 0);
}

double J_value(const SupportFunction& u, const IntegrandSpec& spec, double C0,
               JOrientation orientation, double s_max, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    if (!(C0 > 0.0))
        throw std::invalid_argument("J_value: C0 must be positive");
    std::vector<double> inner(g.node_count, 0.0);
    std::vector<int> bad(g.node_count, 0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> x(g.dim());
        g.node_direction(static_cast<int>(k), x);
        auto f = [&](double s) { return spec.eval_phi_pow_neg(x, s); };
        double a, b;
        switch (orientation) {
        case JOrientation::from_c0: a = C0; b = u.values[k]; break;
        case JOrientation::to_c0:   a = u.values[k]; b = C0; break;
        default:                    a = u.values[k]; b = s_max; break;
        }
        try {
            inner[k] = gl48_integral(f, a, b);
        } catch (const DomainError&) {
            bad[k] = 1;
        }
    });
    for (int k = 0; k < g.node_count; ++k)
        if (bad[k])
            throw std::runtime_error("J_value: phi^(-n/beta) not integrable on the "
                                     "segment at node " + std::to_string(k));
    return integrate(g, inner, exec);
}

double V_value(const SupportFunction& u, const BodyGeometry& geom,
               const IntegrandSpec& spec, double R, VOrientation orientation,
               kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int dim = g.dim();
    if (orientation == VOrientation::outer && !(R > 0.0))
        throw std::invalid_argument("V_value: outer orientation needs R > 0");

    std::vector<double> inner(g.node_count, 0.0);
    std::vector<int> bad(g.node_count, 0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> xi(dim), y(dim);
        const double rho = geom.rho[k];
        for (int i = 0; i < dim; ++i)
            xi[i] = geom.X[k * dim + i] / rho;
        auto f = [&](double r) {
            for (int i = 0; i < dim; ++i)
                y[i] = r * xi[i];
            return spec.eval_G_pow(y) * std::pow(r, g.n);
        };
        try {
            const double value = (orientation == VOrientation::inner)
                                     ? adaptive_radial_integral(f, 0.0, rho, 1e-10)
                                     : adaptive_radial_integral(f, rho, R, 1e-10);
            inner[k] = value * geom.jac[k]; // d(xi) = |Jac A*| dx
        } catch (const std::exception&) {
            bad[k] = 1;
        }
    });
    for (int k = 0; k < g.node_count; ++k)
        if (bad[k])
            throw std::runtime_error(
                "V_value: divergent inner radial integral at node " + std::to_string(k) +
                " (orientation does not match the integrability of G)");
    return integrate(g, inner, exec);
}

ResidualReport stationary_residual(const SupportFunction& u, const BodyGeometry& geom,
                                   const IntegrandSpec& spec, double eta,
                                   kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int dim = g.dim();
    std::vector<double> Q(g.node_count, 0.0);
    std::vector<int> bad(g.node_count, 0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> x(dim);
        g.node_direction(static_cast<int>(k), x);
        try {
            const double phi = spec.eval_phi(x, u.values[k]);
            const double G = spec.eval_G(
                std::span<const double>(geom.X.data() + k * dim, dim));
            Q[k] = phi * G * std::pow(geom.sigma_n[k], spec.beta() / spec.n());
        } catch (const DomainError&) {
            bad[k] = 1;
        }
    });
    for (int k = 0; k < g.node_count; ++k)
        if (bad[k] || !std::isfinite(Q[k]))
            throw std::runtime_error("stationary_residual: integrand failure at node " +
                                     std::to_string(k));
    ResidualReport rep{};
    rep.c_estimate = integrate(g, Q, exec) / g.surface_area;
    double worst = 0.0;
    for (double qk : Q)
        worst = std::max(worst, std::abs(qk - rep.c_estimate));
    rep.residual_max = worst / rep.c_estimate;
    rep.eta_consistency = std::abs(rep.c_estimate * eta - 1.0);
    return rep;
}

double symmetry_defect(const SupportFunction& u) {
    const GridDescriptor& g = *u.grid;
    double worst = 0.0;
    for (int k = 0; k < g.node_count; ++k)
        worst = std::max(worst, std::abs(u.values[k] - u.values[g.antipode[k]]));
    return worst;
}

void record_row(MonitorSeries& series, double t, double eta, const SupportFunction& u,
                const BodyGeometry& geom, const IntegrandSpec& spec,
                kernels::Exec exec) {
    MonitorRow row{};
    row.t = t;
    row.eta = eta;
    row.J = J_value(u, spec, series.config.C0, series.config.j_orientation,
                    series.config.s_max, exec);
    row.V = V_value(u, geom, spec, series.config.R, series.config.v_orientation, exec);
    const auto res = stationary_residual(u, geom, spec, eta, exec);
    row.residual_max = res.residual_max;
    row.c_estimate = res.c_estimate;
    row.min_u = geom.min_u;
    row.max_u = geom.max_u;
    row.min_rho = geom.min_rho;
    row.max_rho = geom.max_rho;
    row.convexity_margin = geom.convexity_margin;
    row.symmetry_defect = symmetry_defect(u);

    const double entries[] = {row.t, row.eta, row.J, row.V, row.residual_max,
                              row.c_estimate, row.min_u, row.max_u, row.min_rho,
                              row.max_rho, row.convexity_margin, row.symmetry_defect};
    static const char* names[] = {"t", "eta", "J", "V", "residual_max", "c_estimate",
                                  "min_u", "max_u", "min_rho", "max_rho",
                                  "convexity_margin", "symmetry_defect"};
    for (int i = 0; i < 12; ++i)
        if (!std::isfinite(entries[i]))
            throw std::runtime_error(std::string("record_row: non-finite monitor value ") +
                                     names[i]);
    if (!series.rows.empty() && !(t > series.rows.back().t))
        throw std::runtime_error("record_row: time must be strictly increasing");
    series.rows.push_back(row);
}

BarrierCheck verify_barrier_condition(const GridDescriptor& grid,
                                      const IntegrandSpec& spec, double r1, double r2) {
    if (!(r1 > 0.0 && r2 > r1))
        throw std::invalid_argument("verify_barrier_condition: need 0 < r1 < r2");
    BarrierCheck chk{true, true, std::numeric_limits<double>::infinity(), 0.0};
    std::vector<double> x(grid.dim()), y(grid.dim());
    for (int k = 0; k < grid.node_count; ++k) {
        grid.node_direction(k, x);
        for (int i = 0; i < grid.dim(); ++i)
            y[i] = r1 * x[i];
        const double lower = spec.eval_phi(x, r1) * spec.eval_G(y) *
                             std::pow(r1, spec.beta());
        for (int i = 0; i < grid.dim(); ++i)
            y[i] = r2 * x[i];
        const double upper = spec.eval_phi(x, r2) * spec.eval_G(y) *
                             std::pow(r2, spec.beta());
        chk.worst_lower = std::min(chk.worst_lower, lower);
        chk.worst_upper = std::max(chk.worst_upper, upper);
    }
    chk.lower_ok = chk.worst_lower >= 1.0;
    chk.upper_ok = chk.worst_upper <= 1.0;
    return chk;
}

} // namespace gcflow
