#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcflow/monitors.hpp"

#include <cmath>
#include <numbers>

using namespace gcflow;
constexpr double kPi = std::numbers::pi;

namespace {
IntegrandSpec power_spec(int n, double beta, double p, double q) {
    return IntegrandSpec(n, beta, PowerPhi{Expr::parse("1", phi_variables(n)), p},
                         PowerG{q}, false);
}
} // namespace

TEST_CASE("adaptive radial integral: smooth, singular, divergent") {
    auto cube = [](double r) { return 3.0 * r * r; };
    CHECK(std::abs(adaptive_radial_integral(cube, 0.0, 1.0, 1e-12) - 1.0) < 1e-12);
    // integrable endpoint singularity r^(-0.9)
    auto sing = [](double r) { return std::pow(r, -0.9); };
    CHECK(std::abs(adaptive_radial_integral(sing, 0.0, 1.0, 1e-11) - 10.0) < 1e-7);
    // reversed limits are signed
    CHECK(std::abs(adaptive_radial_integral(cube, 1.0, 0.0, 1e-12) + 1.0) < 1e-12);
    // non-integrable r^(-1.5) must be reported
    auto div = [](double r) { return std::pow(r, -1.5); };
    CHECK_THROWS(adaptive_radial_integral(div, 0.0, 1.0, 1e-10));
}

TEST_CASE("J: constant integrand gives |S^n| times the segment length") {
    auto g = build_axisymmetric_grid(2, 32);
    auto u = make_sphere(g, 2.0);
    auto spec = power_spec(2, 2.0, 1.0, 3.0); // phi^-n/beta = 1
    CHECK(std::abs(J_value(u, spec, 1.0, JOrientation::from_c0, 50.0) - 4.0 * kPi) <
          1e-10);
    // reversed orientation flips the sign
    CHECK(std::abs(J_value(u, spec, 1.0, JOrientation::to_c0, 50.0) + 4.0 * kPi) < 1e-10);
}

TEST_CASE("J: closed-form antiderivative oracle for the power family") {
    auto g = build_axisymmetric_grid(2, 32);
    auto spec = power_spec(2, 2.0, 4.0, 3.0); // phi^-n/beta = s^3
    auto u1 = make_sphere(g, 1.0);
    CHECK(std::abs(J_value(u1, spec, 1.0, JOrientation::from_c0, 50.0)) < 1e-12);
    auto u15 = make_sphere(g, 1.5);
    const double expect = 4.0 * kPi * (std::pow(1.5, 4.0) - 1.0) / 4.0;
    CHECK(std::abs(J_value(u15, spec, 1.0, JOrientation::from_c0, 50.0) - expect) <
          1e-10 * expect);
}

TEST_CASE("J: truncated improper orientation") {
    auto g = build_axisymmetric_grid(2, 32);
    auto u = make_sphere(g, 2.0);
    auto spec = power_spec(2, 2.0, -1.0, 3.0); // phi^-n/beta = s^-2
    const double expect = 4.0 * kPi * (0.5 - 1.0 / 50.0);
    CHECK(std::abs(J_value(u, spec, 1.0, JOrientation::to_smax, 50.0) - expect) <
          1e-10 * expect);
}

TEST_CASE("V: ball volume and the power-family oracle") {
    auto g = build_axisymmetric_grid(2, 32);
    auto u = make_sphere(g, 1.3);
    auto geom = geometry_of(u);
    auto gone = power_spec(2, 2.0, 1.0, 3.0); // G = 1
    const double vol = V_value(u, geom, gone, 0.0, VOrientation::inner);
    CHECK(std::abs(vol - 4.0 * kPi * std::pow(1.3, 3) / 3.0) < 1e-9);

    auto u2 = make_sphere(g, 2.0);
    auto geom2 = geometry_of(u2);
    auto q1 = power_spec(2, 2.0, 1.0, 1.0); // G^(n/beta) r^n = r^(q-1) = 1
    CHECK(std::abs(V_value(u2, geom2, q1, 0.0, VOrientation::inner) - 8.0 * kPi) < 1e-9);

    // integrable singularity at the origin for 0 < q < 1
    auto qh = power_spec(2, 2.0, 1.0, 0.5);
    CHECK(std::abs(V_value(u2, geom2, qh, 0.0, VOrientation::inner) -
                   4.0 * kPi * std::sqrt(2.0) / 0.5) < 1e-6);

    // empty outer shell
    CHECK(std::abs(V_value(u2, geom2, gone, 2.0, VOrientation::outer)) < 1e-10);

    // divergent inner integral for q <= 0 is an error, not a number
    auto qm = power_spec(2, 2.0, 1.0, -1.0);
    CHECK_THROWS(V_value(u2, geom2, qm, 0.0, VOrientation::inner));
}

TEST_CASE("V outer orientation: closed-form shell for q = 1") {
    auto g = build_axisymmetric_grid(2, 48);
    auto u = make_sphere(g, 1.0);
    auto geom = geometry_of(u);
    auto spec = power_spec(2, 2.0, 1.0, 1.0); // integrand r^(q-1) = 1
    const double got = V_value(u, geom, spec, 3.0, VOrientation::outer);
    CHECK(std::abs(got - 4.0 * kPi * 2.0) < 1e-9);
}

TEST_CASE("monotone quantities are invariant to C0 and R up to flow constants") {
    auto g = build_axisymmetric_grid(2, 32);
    auto spec = power_spec(2, 2.0, 4.0, 1.0);
    auto ua = make_sphere(g, 0.9);
    SupportFunction ub{&g, std::vector<double>(g.node_count)};
    for (int k = 0; k < g.node_count; ++k)
        ub.values[k] = 1.1 + 0.02 * (3.0 * g.t[k] * g.t[k] - 1.0);

    const double dJa = J_value(ua, spec, 1.0, JOrientation::from_c0, 50.0) -
                       J_value(ua, spec, 2.0, JOrientation::from_c0, 50.0);
    const double dJb = J_value(ub, spec, 1.0, JOrientation::from_c0, 50.0) -
                       J_value(ub, spec, 2.0, JOrientation::from_c0, 50.0);
    CHECK(std::abs(dJa - dJb) < 1e-10 * std::abs(dJa));

    auto ga = geometry_of(ua);
    auto gb = geometry_of(ub);
    const double dVa = V_value(ua, ga, spec, 3.0, VOrientation::outer) -
                       V_value(ua, ga, spec, 4.0, VOrientation::outer);
    const double dVb = V_value(ub, gb, spec, 3.0, VOrientation::outer) -
                       V_value(ub, gb, spec, 4.0, VOrientation::outer);
    CHECK(std::abs(dVa - dVb) < 1e-9 * std::abs(dVa));
}

TEST_CASE("stationary residual: exact sphere solutions and a non-stationary witness") {
    auto g = build_axisymmetric_grid(2, 48);
    // barrier example p = 4, q = 1: u = 1 solves phi G sigma^(beta/n) = 1
    auto spec = power_spec(2, 2.0, 4.0, 1.0);
    auto u1 = make_sphere(g, 1.0);
    auto geom1 = geometry_of(u1);
    auto r1 = stationary_residual(u1, geom1, spec, 1.0);
    CHECK(r1.residual_max < 1e-8);
    CHECK(std::abs(r1.c_estimate - 1.0) < 1e-8);

    // phi = G = 1: Q = r^beta exactly
    auto iso = power_spec(2, 2.0, 1.0, 3.0);
    auto u2 = make_sphere(g, 2.0);
    auto geom2 = geometry_of(u2);
    auto r2 = stationary_residual(u2, geom2, iso, 0.25);
    CHECK(r2.residual_max < 1e-12);
    CHECK(std::abs(r2.c_estimate - 4.0) < 1e-12);
    CHECK(r2.eta_consistency < 1e-12);

    SupportFunction up{&g, std::vector<double>(g.node_count)};
    for (int k = 0; k < g.node_count; ++k)
        up.values[k] = 1.0 + 0.05 * (3.0 * g.t[k] * g.t[k] - 1.0);
    auto geomp = geometry_of(up);
    auto rp = stationary_residual(up, geomp, spec, 1.0);
    CHECK(rp.residual_max > 1e-3);
}

TEST_CASE("record_row populates a full row and enforces increasing time") {
    auto g = build_full2d_grid(16, 16);
    auto u = make_sphere(g, 2.0);
    auto geom = geometry_of(u);
    auto spec = power_spec(2, 2.0, 1.0, 3.0);
    MonitorSeries series;
    series.config.C0 = 1.0;
    series.config.R = 4.0;
    record_row(series, 0.0, 0.25, u, geom, spec);
    CHECK(series.rows.size() == 1);
    record_row(series, 0.5, 0.25, u, geom, spec);
    CHECK(series.rows.size() == 2);
    CHECK_THROWS(record_row(series, 0.5, 0.25, u, geom, spec));

    const auto& row = series.rows.front();
    CHECK(row.symmetry_defect < 1e-14); // even body, exact pairing
    CHECK(row.min_u == row.max_u);
    CHECK(row.min_rho == doctest::Approx(row.max_rho).epsilon(1e-14));
    CHECK(row.convexity_margin == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("barrier condition: verified for p > q and refuted otherwise") {
    auto g = build_axisymmetric_grid(2, 24);
    auto spec = power_spec(2, 2.0, 4.0, 1.0); // phi G r^beta = r^(q-p) = r^-3
    auto ok = verify_barrier_condition(g, spec, 0.5, 2.0);
    CHECK(ok.lower_ok);
    CHECK(ok.upper_ok);
    CHECK(ok.worst_lower == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(ok.worst_upper == doctest::Approx(0.125).epsilon(1e-12));

    auto bad = verify_barrier_condition(g, spec, 1.5, 2.0);
    CHECK_FALSE(bad.lower_ok); // 1.5^-3 < 1
    CHECK(bad.upper_ok);

    CHECK_THROWS(verify_barrier_condition(g, spec, 2.0, 0.5));
}
