// Functionals tracked along the flow: the monotone quantity J, the conserved
// quantity V, the stationary residual of phi G sigma_n^(beta/n) = c, and the
// per-row monitor series with symmetry and convexity diagnostics.

#pragma once

#include "gcflow/geometry.hpp"
#include "gcflow/integrand.hpp"

#include <functional>
#include <vector>

namespace gcflow {

// J = ∫_S ∫ phi^(-n/beta)(x, s) ds dx with the inner segment oriented
//   from_c0:  C0 -> u   (non-increasing along the flow for p >= 0 cases)
//   to_c0:    u  -> C0  (non-decreasing cases)
//   to_smax:  u  -> s_max (truncated stand-in for the improper upper limit)
enum class JOrientation { from_c0, to_c0, to_smax };

// V = ∫_S [inner radial integral of G^(n/beta) r^n] dxi, evaluated in
// x-coordinates through the reverse Gauss map Jacobian u sigma_n / rho^(n+1).
//   inner: 0 -> rho (needs integrability at 0)
//   outer: rho -> R (signed shell against the ball B_R)
enum class VOrientation { inner, outer };

struct MonitorConfig {
    double C0 = 1.0;
    double R = 0.0;     // 0: set to 2 max u0 at run start
    double s_max = 50.0;
    int cadence = 10;
    JOrientation j_orientation = JOrientation::from_c0;
    VOrientation v_orientation = VOrientation::inner;
};

struct MonitorRow {
    double t, eta, J, V;
    double residual_max, c_estimate;
    double min_u, max_u, min_rho, max_rho;
    double convexity_margin, symmetry_defect;
};

struct MonitorSeries {
    MonitorConfig config;
    std::vector<MonitorRow> rows;
};

double J_value(const SupportFunction& u, const IntegrandSpec& spec, double C0,
               JOrientation orientation, double s_max,
               kernels::Exec exec = kernels::default_exec());

// Throws std::runtime_error naming the divergent inner integral when the
// radial quadrature cannot converge (orientation/spec mismatch).
double V_value(const SupportFunction& u, const BodyGeometry& geom,
               const IntegrandSpec& spec, double R, VOrientation orientation,
               kernels::Exec exec = kernels::default_exec());

struct ResidualReport {
    double residual_max;  // max_k |Q_k - c| / c for Q = phi G sigma_n^(beta/n)
    double c_estimate;    // quadrature mean of Q
    double eta_consistency; // |c eta - 1| (normalized mode)
};

ResidualReport stationary_residual(const SupportFunction& u, const BodyGeometry& geom,
                                   const IntegrandSpec& spec, double eta,
                                   kernels::Exec exec = kernels::default_exec());

double symmetry_defect(const SupportFunction& u);

// Appends one fully populated row; enforces strictly increasing t and finite
// entries (throws std::runtime_error with the offending column otherwise).
void record_row(MonitorSeries& series, double t, double eta, const SupportFunction& u,
                const BodyGeometry& geom, const IntegrandSpec& spec,
                kernels::Exec exec = kernels::default_exec());

// Sphere barrier condition: phi(x, r) G(r x) r^beta >= 1 at r1 and <= 1 at r2
// over all grid directions.
struct BarrierCheck {
    bool lower_ok, upper_ok;
    double worst_lower, worst_upper; // extremal values of phi G r^beta
};
BarrierCheck verify_barrier_condition(const GridDescriptor& grid,
                                      const IntegrandSpec& spec, double r1, double r2);

// Adaptive 1-D quadrature used for the V inner integral (exposed for tests).
// Flat per-panel tolerance; throws std::runtime_error on divergence.
double adaptive_radial_integral(const std::function<double(double)>& f, double a,
                                double b, double tol);

} // namespace gcflow
