// The (phi, G, beta, n) integrand bundle driving the flow speed
// phi(x, u) G(X) sigma_n^(beta/n), with the built-in power family
//   phi^(n/beta) = f(x) s^(1-p),   G^(n/beta) = |y|^(q-n-1)
// stored exactly in that convention so configs can use (p, q) directly,
// plus expression-backed general integrands and the parameter taxonomy of
// the power family.

#pragma once

#include "gcflow/expr.hpp"

#include <optional>
#include <span>
#include <variant>

namespace gcflow {

struct PowerPhi {
    Expr f;   // positive anisotropy factor over (x1..x_{n+1})
    double p; // phi^(n/beta) = f(x) s^(1-p)
};
struct ExprPhi {
    Expr e; // phi(x1..x_{n+1}, s) directly
};
struct PowerG {
    double q; // G^(n/beta) = |y|^(q-n-1)
};
struct ExprG {
    Expr e; // G(y1..y_{n+1}, r) with r = |y|
};

std::vector<std::string> phi_variables(int n); // x1..x_{n+1}, s
std::vector<std::string> g_variables(int n);   // y1..y_{n+1}, r

class IntegrandSpec {
public:
    // Probes positivity on construction and, if even_claimed, the antipodal
    // symmetry of phi and G on 1000 deterministic sample points.
    IntegrandSpec(int n, double beta, std::variant<PowerPhi, ExprPhi> phi,
                  std::variant<PowerG, ExprG> g, bool even_claimed);

    double eval_phi(std::span<const double> x, double s) const;
    double eval_phi_pow_neg(std::span<const double> x, double s) const; // phi^(-n/beta)
    double eval_G(std::span<const double> y) const;
    double eval_G_pow(std::span<const double> y) const; // G^(n/beta)

    int n() const { return n_; }
    double beta() const { return beta_; }
    bool even_claimed() const { return even_claimed_; }
    bool phi_is_power() const { return std::holds_alternative<PowerPhi>(phi_); }
    bool g_is_power() const { return std::holds_alternative<PowerG>(g_); }
    std::optional<double> p() const;
    std::optional<double> q() const;

private:
    int n_;
    double beta_;
    std::variant<PowerPhi, ExprPhi> phi_;
    std::variant<PowerG, ExprG> g_;
    bool even_claimed_;

    void run_probes() const;
};

// q* of the power-family taxonomy:
//   q >= n+1     -> q/(q-n)
//   1 < q < n+1  -> n q/(q-1)
//   0 < q <= 1   -> +infinity
double qstar(double q, int n);

// Which theorem hypotheses a power-family pair (p, q) satisfies.
struct PowerCaseSet {
    bool barrier = false; // sphere barriers exist: p > q
    bool general = false; // non-even existence: p > 0 >= q or p >= 0 > q
    bool even = false;    // even existence: p > -1, or q < 1, or -q* < p < 0 < q
};
PowerCaseSet classify_power_case(double p, double q, int n);

} // namespace gcflow
