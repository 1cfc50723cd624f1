#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcflow/integrand.hpp"

#include <cmath>
#include <limits>

using namespace gcflow;

namespace {
Expr one_expr(int n) { return Expr::parse("1", phi_variables(n)); }

IntegrandSpec power_spec(int n, double beta, double p, double q, bool even = false) {
    return IntegrandSpec(n, beta, PowerPhi{one_expr(n), p}, PowerG{q}, even);
}
} // namespace

TEST_CASE("power phi: exponent conventions") {
    const double x[3] = {0, 0, 1};
    // p = 1 kills the support dependence entirely
    auto s1 = power_spec(2, 2.0, 1.0, 3.0);
    CHECK(s1.eval_phi(x, 0.37) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s1.eval_phi(x, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
    // p = 4, beta = n = 2: phi = s^(1-p) = s^-3
    auto s4 = power_spec(2, 2.0, 4.0, 3.0);
    CHECK(s4.eval_phi(x, 2.0) == doctest::Approx(0.125).epsilon(1e-14));
    // anisotropy factor enters through f
    auto varphi = IntegrandSpec(
        2, 2.0, PowerPhi{Expr::parse("1 + 0.2*pow(x3,2)", phi_variables(2)), 1.0},
        PowerG{3.0}, true);
    CHECK(varphi.eval_phi(x, 1.0) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("power G: exponent conventions") {
    auto sp = power_spec(2, 2.0, 1.0, 3.0); // q = n+1: G constant 1
    const double y[3] = {0.3, -0.4, 1.2};
    CHECK(sp.eval_G(y) == doctest::Approx(1.0).epsilon(1e-14));
    auto s1 = power_spec(2, 2.0, 1.0, 1.0); // q = 1, beta = n: G = |y|^-2
    const double y2[3] = {2.0, 0.0, 0.0};
    CHECK(s1.eval_G(y2) == doctest::Approx(0.25).epsilon(1e-14));
    const double zero[3] = {0, 0, 0};
    CHECK_THROWS_AS(s1.eval_G(zero), DomainError);
}

TEST_CASE("expression phi/G match the power closed forms on a probe set") {
    // phi = s^-3 via both routes (beta = n)
    auto closed = power_spec(2, 2.0, 4.0, 1.0);
    auto exprd = IntegrandSpec(2, 2.0, ExprPhi{Expr::parse("pow(s, -3)", phi_variables(2))},
                               ExprG{Expr::parse("pow(r, -2)", g_variables(2))}, false);
    for (double s : {0.2, 0.7, 1.0, 3.3, 9.0}) {
        const double x[3] = {std::sqrt(0.5), 0.5, 0.5};
        CHECK(std::abs(closed.eval_phi(x, s) - exprd.eval_phi(x, s)) <
              1e-14 * closed.eval_phi(x, s));
        const double y[3] = {s, 0.5 * s, -0.2 * s};
        CHECK(std::abs(closed.eval_G(y) - exprd.eval_G(y)) < 1e-14 * closed.eval_G(y));
        CHECK(std::abs(closed.eval_G_pow(y) - exprd.eval_G_pow(y)) <
              1e-13 * closed.eval_G_pow(y));
        CHECK(std::abs(closed.eval_phi_pow_neg(x, s) - exprd.eval_phi_pow_neg(x, s)) <
              1e-13 * closed.eval_phi_pow_neg(x, s));
    }
}

TEST_CASE("expression G: exp(-(r^2)) at |y| = 1") {
    auto sp = IntegrandSpec(2, 2.0, ExprPhi{Expr::parse("1", phi_variables(2))},
                            ExprG{Expr::parse("exp(-(r^2))", g_variables(2))}, false);
    const double y[3] = {1, 0, 0};
    CHECK(sp.eval_G(y) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("evenness probe accepts even integrands and rejects odd ones") {
    CHECK_NOTHROW(IntegrandSpec(
        2, 2.0, PowerPhi{Expr::parse("1 + 0.2*pow(x3,2)", phi_variables(2)), 4.0},
        PowerG{2.0}, true));
    CHECK_THROWS(IntegrandSpec(
        2, 2.0, PowerPhi{Expr::parse("1 + 0.2*x3", phi_variables(2)), 4.0},
        PowerG{2.0}, true));
    CHECK_THROWS(IntegrandSpec(2, 2.0, ExprPhi{Expr::parse("1", phi_variables(2))},
                               ExprG{Expr::parse("exp(y1)", g_variables(2))}, true));
}

TEST_CASE("positivity probe rejects sign-changing integrands") {
    CHECK_THROWS(IntegrandSpec(
        2, 2.0, PowerPhi{Expr::parse("x3", phi_variables(2)), 1.0}, PowerG{3.0}, false));
}

TEST_CASE("qstar branches") {
    CHECK(qstar(3.0, 2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(qstar(2.0, 2) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(qstar(0.5, 2) == std::numeric_limits<double>::infinity());
    CHECK(qstar(1.0, 2) == std::numeric_limits<double>::infinity());
    CHECK(qstar(5.0, 3) == doctest::Approx(2.5).epsilon(1e-15)); // q >= n+1 branch
    CHECK_THROWS(qstar(0.0, 2));
    CHECK_THROWS(qstar(-1.0, 2));
}

TEST_CASE("power case classification") {
    auto c1 = classify_power_case(4.0, 1.0, 2);
    CHECK(c1.barrier);
    CHECK(c1.even);
    CHECK_FALSE(c1.general);

    auto c2 = classify_power_case(-0.5, 0.0, 2);
    CHECK_FALSE(c2.barrier);
    CHECK_FALSE(c2.general);
    CHECK(c2.even);

    auto c3 = classify_power_case(-2.0, 3.0, 2); // q* = 3, -3 < -2 < 0 < 3
    CHECK(c3.even);
    CHECK_FALSE(c3.barrier);
    CHECK_FALSE(c3.general);

    auto c4 = classify_power_case(1.0, 0.0, 2); // p > 0 >= q
    CHECK(c4.general);
    CHECK(c4.barrier);
    CHECK(c4.even);

    auto c5 = classify_power_case(0.0, -1.0, 2); // p >= 0 > q
    CHECK(c5.general);

    auto c6 = classify_power_case(-4.0, 3.0, 2); // p below -q*
    CHECK_FALSE(c6.even);
    CHECK_FALSE(c6.general);
}

TEST_CASE("invalid construction parameters") {
    CHECK_THROWS(power_spec(1, 2.0, 1.0, 1.0));
    CHECK_THROWS(power_spec(2, 0.0, 1.0, 1.0));
    CHECK_THROWS(power_spec(2, -1.0, 1.0, 1.0));
}
