#include "gcflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gcflow {

SupportFunction build_initial_body(const GridDescriptor& grid, const InitialBody& body) {
    SupportFunction u{&grid, {}};
    switch (body.shape) {
    case InitialBody::Shape::sphere:
        u = make_sphere(grid, body.radius);
        break;
    case InitialBody::Shape::ellipsoid:
        u = make_ellipsoid(grid, body.semi_axes[0], body.semi_axes[1], body.semi_axes[2]);
        break;
    case InitialBody::Shape::perturbed_sphere: {
        if (!body.perturbation)
            throw std::invalid_argument("initial body: perturbed_sphere needs an expression");
        u.values.assign(grid.node_count, 0.0);
        std::vector<double> x(grid.dim());
        for (int k = 0; k < grid.node_count; ++k) {
            grid.node_direction(k, x);
            u.values[k] = body.radius * (1.0 + body.amplitude * body.perturbation->eval(x));
            if (!(u.values[k] > 0.0))
                throw std::invalid_argument(
                    "initial body: perturbation drives the support function non-positive "
                    "at node " + std::to_string(k));
        }
        break;
    }
    }
    if (body.even) {
        const double defect = symmetry_defect(u);
        double scale = 0.0;
        for (double v : u.values) scale = std::max(scale, std::abs(v));
        if (defect > 1e-10 * scale)
            throw std::invalid_argument(
                "initial body: claimed even but antipodal defect is " +
                std::to_string(defect));
    }
    return u;
}

EtaReport eta_value(const SupportFunction& u, const BodyGeometry& geom,
                    const IntegrandSpec& spec, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int dim = g.dim();
    std::vector<double> num(g.node_count, 0.0), den(g.node_count, 0.0);
    std::vector<int> bad(g.node_count, 0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> x(dim);
        g.node_direction(static_cast<int>(k), x);
        const std::span<const double> X(geom.X.data() + k * dim, dim);
        try {
            const double gpow = spec.eval_G_pow(X);
            const double gval = spec.eval_G(X);
            const double phi = spec.eval_phi(x, u.values[k]);
            const double sig = geom.sigma_n[k];
            const double sig_pow = std::pow(sig, spec.beta() / spec.n());
            num[k] = gpow * u.values[k] * sig;
            den[k] = u.values[k] * phi * gpow * gval * sig_pow * sig;
        } catch (const DomainError&) {
            bad[k] = 1;
        }
    });
    for (int k = 0; k < g.node_count; ++k)
        if (bad[k])
            throw std::runtime_error("eta: integrand domain failure at node " +
                                     std::to_string(k));
    EtaReport rep{};
    rep.numerator = integrate(g, num, exec);
    rep.denominator = integrate(g, den, exec);
    if (!(rep.denominator > 0.0) || !std::isfinite(rep.denominator) ||
        !std::isfinite(rep.numerator))
        throw std::runtime_error("eta: non-positive denominator (loss of convexity or "
                                 "integrand domain failure)");
    rep.value = rep.numerator / rep.denominator;
    return rep;
}

double eta_numerator_xi_path(const SupportFunction& u, const IntegrandSpec& spec,
                             kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int dim = g.dim();
    SupportInterpolant interp(u, exec);
    std::vector<double> f(g.node_count, 0.0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> xi(dim), y(dim);
        g.node_direction(static_cast<int>(k), xi);
        const double rho = interp.radial(xi);
        for (int i = 0; i < dim; ++i)
            y[i] = rho * xi[i];
        f[k] = spec.eval_G_pow(y) * std::pow(rho, g.n + 1);
    });
    return integrate(g, f, exec);
}

RhsEval flow_rhs(const SupportFunction& u, const BodyGeometry& geom,
                 const IntegrandSpec& spec, double eta, kernels::Exec exec) {
    const GridDescriptor& g = *u.grid;
    const int dim = g.dim();
    RhsEval out;
    out.rhs.assign(g.node_count, 0.0);
    std::vector<double> speed(g.node_count, 0.0), stiff(g.node_count, 0.0);
    std::vector<int> bad(g.node_count, 0);
    kernels::parallel_for(exec, static_cast<std::size_t>(g.node_count), [&](std::size_t k) {
        std::vector<double> x(dim);
        g.node_direction(static_cast<int>(k), x);
        try {
            if (!(geom.sigma_n[k] > 0.0))
                throw DomainError("sigma_n non-positive", geom.sigma_n[k]);
            const double phi = spec.eval_phi(x, u.values[k]);
            const double G = spec.eval_G(
                std::span<const double>(geom.X.data() + k * dim, dim));
            const double q = eta * phi * G * std::pow(geom.sigma_n[k], spec.beta() / spec.n());
            out.rhs[k] = (q - 1.0) * u.values[k];
            speed[k] = std::abs(out.rhs[k]) / u.values[k];
            stiff[k] = q * (spec.beta() / spec.n()) * u.values[k] /
                       std::max(geom.min_eig[k], 1e-300);
        } catch (const DomainError&) {
            bad[k] = 1;
        }
    });
    for (int k = 0; k < g.node_count; ++k)
        if (bad[k])
            throw std::runtime_error("flow_rhs: integrand domain failure at node " +
                                     std::to_string(k));
    out.max_rel_velocity = kernels::max_abs(exec, speed);
    out.stiffness = kernels::max_abs(exec, stiff);
    return out;
}

namespace {

struct TrialResult {
    bool ok = false;
    SupportFunction u;
    BodyGeometry geom;
    double eta = 1.0;
    RhsEval rhs_trial; // stage-2 evaluation, reused for diagnostics
};

// One Heun attempt at fixed dt; no state mutation.
TrialResult attempt_step(const FlowState& state, const FlowConfig& config,
                         const GridDescriptor& grid, double dt, double eps_b,
                         const RhsEval& f1, kernels::Exec exec) {
    TrialResult res;
    const int K = grid.node_count;

    SupportFunction u_trial{&grid, std::vector<double>(K)};
    for (int k = 0; k < K; ++k) {
        u_trial.values[k] = state.u.values[k] + dt * f1.rhs[k];
        if (!(u_trial.values[k] > 0.0) || !std::isfinite(u_trial.values[k]))
            return res;
    }
    BodyGeometry geom_trial;
    RhsEval f2;
    double eta_trial = 1.0;
    try {
        geom_trial = geometry_of(u_trial, exec);
        if (geom_trial.convexity_margin <= eps_b)
            return res;
        if (config.mode == FlowMode::normalized)
            eta_trial = eta_value(u_trial, geom_trial, config.spec, exec).value;
        f2 = flow_rhs(u_trial, geom_trial, config.spec, eta_trial, exec);
    } catch (const std::exception&) {
        return res;
    }

    SupportFunction u_new{&grid, std::vector<double>(K)};
    for (int k = 0; k < K; ++k) {
        u_new.values[k] = state.u.values[k] + 0.5 * dt * (f1.rhs[k] + f2.rhs[k]);
        if (!(u_new.values[k] > 0.0) || !std::isfinite(u_new.values[k]))
            return res;
    }
    if (config.stepping.even_projection)
        for (int k = 0; k < K; ++k) {
            const int ak = grid.antipode[k];
            if (ak > static_cast<int>(k)) {
                const double avg = 0.5 * (u_new.values[k] + u_new.values[ak]);
                u_new.values[k] = avg;
                u_new.values[ak] = avg;
            }
        }
    try {
        res.geom = geometry_of(u_new, exec);
        if (res.geom.convexity_margin <= eps_b)
            return res;
        if (config.mode == FlowMode::normalized)
            res.eta = eta_value(u_new, res.geom, config.spec, exec).value;
    } catch (const std::exception&) {
        return res;
    }
    res.u = std::move(u_new);
    res.rhs_trial = std::move(f2);
    res.ok = true;
    return res;
}

} // namespace

FlowResult run_flow(const FlowConfig& config, const GridDescriptor& grid,
                    kernels::Exec exec) {
    const SteppingConfig& st = config.stepping;
    if (!(st.dt_init > 0.0) || !(st.stop_tol > 0.0) || !(st.convexity_floor_rel > 0.0))
        throw std::invalid_argument("run_flow: dt_init, stop_tol and the convexity floor "
                                    "must be positive");

    FlowState state;
    state.u = build_initial_body(grid, config.initial);
    state.geom = geometry_of(state.u, exec);
    if (!(state.geom.convexity_margin > 0.0)) {
        int worst = 0;
        for (int k = 0; k < grid.node_count; ++k)
            if (state.geom.min_eig[k] < state.geom.min_eig[worst])
                worst = k;
        throw std::invalid_argument(
            "run_flow: initial body is not uniformly convex (min eigenvalue " +
            std::to_string(state.geom.convexity_margin) + " at node " +
            std::to_string(worst) + ")");
    }
    const double eps_b = st.convexity_floor_rel * state.geom.min_u;

    if (config.mode == FlowMode::barrier) {
        const auto chk = verify_barrier_condition(grid, config.spec, config.r1, config.r2);
        if (!chk.lower_ok || !chk.upper_ok)
            throw std::invalid_argument(
                "run_flow: barrier condition fails (phi G r^beta at r1: " +
                std::to_string(chk.worst_lower) + ", at r2: " +
                std::to_string(chk.worst_upper) + ")");
        if (!(config.r1 < state.geom.min_rho && state.geom.max_rho < config.r2))
            throw std::invalid_argument(
                "run_flow: initial body must satisfy r1 < rho < r2");
    }

    state.eta = (config.mode == FlowMode::normalized)
                    ? eta_value(state.u, state.geom, config.spec, exec).value
                    : 1.0;
    state.dt = st.dt_init;

    FlowResult result;
    result.series.config = config.monitor;
    if (result.series.config.R == 0.0)
        result.series.config.R = 2.0 * state.geom.max_u;

    record_row(result.series, 0.0, state.eta, state.u, state.geom, config.spec, exec);
    double last_recorded_t = 0.0;
    auto record_state = [&]() {
        if (state.t > last_recorded_t) {
            record_row(result.series, state.t, state.eta, state.u, state.geom,
                       config.spec, exec);
            last_recorded_t = state.t;
        }
    };

    Termination reason = Termination::max_steps_reached;
    std::string message;

    RhsEval f1 = flow_rhs(state.u, state.geom, config.spec, state.eta, exec);
    if (f1.max_rel_velocity < st.stop_tol) {
        reason = Termination::converged;
        message = "initial body is already stationary";
    } else {
        while (true) {
            if (state.accepted >= st.max_steps) {
                reason = Termination::max_steps_reached;
                message = "velocity still above stop_tol after max_steps";
                break;
            }
            double dt_step = state.dt;
            if (st.t_end > 0.0)
                dt_step = std::min(dt_step, st.t_end - state.t);

            bool accepted = false;
            for (int halving = 0; halving <= 30; ++halving) {
                TrialResult trial =
                    attempt_step(state, config, grid, dt_step, eps_b, f1, exec);
                if (trial.ok) {
                    state.u = std::move(trial.u);
                    state.geom = std::move(trial.geom);
                    state.eta = trial.eta;
                    state.t += dt_step;
                    ++state.accepted;
                    accepted = true;

                    // grow dt under the parabolic cap
                    const double h = grid.min_spacing();
                    const double cap = st.cfl_factor * h * h /
                                       std::max(trial.rhs_trial.stiffness, 1e-300);
                    state.dt = std::min({state.dt * 1.2, st.dt_max, cap});

                    try {
                        f1 = flow_rhs(state.u, state.geom, config.spec, state.eta, exec);
                    } catch (const std::exception& e) {
                        reason = Termination::breakdown;
                        message = e.what();
                    }
                    break;
                }
                ++state.rejected;
                dt_step *= 0.5;
                state.dt = dt_step;
                if (!(dt_step > 1e-300)) break;
            }
            if (!accepted) {
                reason = Termination::breakdown;
                message = "step size underflow after 30 halvings at t = " +
                          std::to_string(state.t);
                break;
            }
            if (reason == Termination::breakdown)
                break;

            if (state.accepted % config.monitor.cadence == 0)
                record_state();

            if (f1.max_rel_velocity < st.stop_tol) {
                reason = Termination::converged;
                message = "relative velocity below stop_tol";
                break;
            }
            if (st.t_end > 0.0 && state.t >= st.t_end * (1.0 - 1e-14)) {
                reason = Termination::t_end_reached;
                message = "configured time horizon reached";
                break;
            }
        }
    }

    record_state();
    result.termination = reason;
    result.message = message;
    result.accepted = state.accepted;
    result.rejected = state.rejected;
    result.final_t = state.t;
    result.final_dt = state.dt;
    result.final_eta = state.eta;
    const auto res = stationary_residual(state.u, state.geom, config.spec, state.eta, exec);
    result.final_residual_max = res.residual_max;
    result.final_c_estimate = res.c_estimate;
    result.final_u = std::move(state.u);
    return result;
}

} // namespace gcflow
