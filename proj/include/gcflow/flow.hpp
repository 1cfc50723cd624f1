// Time integration of the normalized expanding flow
//   du/dt = (eta(t) phi(x, u) G(X) sigma_n^(beta/n) - 1) u
// and the eta = 1 barrier variant: explicit Heun steps with transactional
// accept/reject on positivity, convexity margin and integrand domain, dt
// halving on rejection and capped growth on acceptance.

#pragma once

#include "gcflow/geometry.hpp"
#include "gcflow/integrand.hpp"
#include "gcflow/monitors.hpp"

#include <optional>
#include <string>

namespace gcflow {

enum class FlowMode { normalized, barrier };

struct InitialBody {
    enum class Shape { sphere, ellipsoid, perturbed_sphere };
    Shape shape = Shape::sphere;
    double radius = 1.0;
    double semi_axes[3] = {1.0, 1.0, 1.0};
    std::optional<Expr> perturbation; // over x1..x_{n+1}
    double amplitude = 0.0;
    bool even = false; // claimed; validated against the antipodal pairing
};

SupportFunction build_initial_body(const GridDescriptor& grid, const InitialBody& body);

struct SteppingConfig {
    double dt_init = 1e-4;
    double dt_max = 1e-2;
    double cfl_factor = 0.1;
    double stop_tol = 1e-8;  // on max |du/dt| / u
    double t_end = 0.0;      // > 0: stop at this time instead of convergence
    long max_steps = 200000;
    double convexity_floor_rel = 1e-8; // eps_b = rel * min u0
    bool even_projection = false;      // average antipodal pairs each step
};

struct FlowConfig {
    IntegrandSpec spec;
    FlowMode mode = FlowMode::normalized;
    InitialBody initial;
    SteppingConfig stepping;
    MonitorConfig monitor;
    double r1 = 0.0, r2 = 0.0; // barrier radii, verified in barrier mode
};

struct EtaReport {
    double value;
    double numerator;   // ∫ G^(n/beta)(X) u sigma_n dx (x-path)
    double denominator; // ∫ u phi G^(n/beta+1) sigma_n^(beta/n+1) dx
};

// Throws std::runtime_error on a non-positive denominator.
EtaReport eta_value(const SupportFunction& u, const BodyGeometry& geom,
                    const IntegrandSpec& spec,
                    kernels::Exec exec = kernels::default_exec());

// Verification route for the eta numerator: sample rho on grid directions and
// integrate G^(n/beta)(rho xi) rho^(n+1) in xi coordinates directly.
double eta_numerator_xi_path(const SupportFunction& u, const IntegrandSpec& spec,
                             kernels::Exec exec = kernels::default_exec());

struct RhsEval {
    std::vector<double> rhs;  // (eta phi G sigma^(beta/n) - 1) u per node
    double max_rel_velocity;  // max |rhs| / u
    double stiffness;         // max (beta/n) eta phi G sigma^(beta/n) u / min_eig(b)
};

// Throws std::runtime_error naming the node on integrand domain failure.
RhsEval flow_rhs(const SupportFunction& u, const BodyGeometry& geom,
                 const IntegrandSpec& spec, double eta,
                 kernels::Exec exec = kernels::default_exec());

struct FlowState {
    SupportFunction u;
    BodyGeometry geom;
    double t = 0.0;
    double dt = 0.0;
    double eta = 1.0;
    long accepted = 0, rejected = 0;
};

enum class Termination { converged, max_steps_reached, t_end_reached, breakdown };

struct FlowResult {
    SupportFunction final_u;
    MonitorSeries series;
    Termination termination = Termination::breakdown;
    long accepted = 0, rejected = 0;
    double final_t = 0.0, final_dt = 0.0, final_eta = 1.0;
    double final_residual_max = 0.0, final_c_estimate = 0.0;
    std::string message;
};

// Validates the initial body (positivity, uniform convexity, claimed
// evenness) and, in barrier mode, condition phi(x,r) G(rx) r^beta >= 1 at r1
// / <= 1 at r2 together with r1 < rho_0 < r2; throws std::invalid_argument
// on violations. Numerical trouble during the run ends with
// Termination::breakdown instead.
FlowResult run_flow(const FlowConfig& config, const GridDescriptor& grid,
                    kernels::Exec exec = kernels::default_exec());

} // namespace gcflow
