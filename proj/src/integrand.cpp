#include "gcflow/integrand.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcflow {

std::vector<std::string> phi_variables(int n) {
    std::vector<std::string> v;
    for (int i = 1; i <= n + 1; ++i)
        v.push_back("x" + std::to_string(i));
    v.push_back("s");
    return v;
}

std::vector<std::string> g_variables(int n) {
    std::vector<std::string> v;
    for (int i = 1; i <= n + 1; ++i)
        v.push_back("y" + std::to_string(i));
    v.push_back("r");
    return v;
}

IntegrandSpec::IntegrandSpec(int n, double beta, std::variant<PowerPhi, ExprPhi> phi,
                             std::variant<PowerG, ExprG> g, bool even_claimed)
    : n_(n), beta_(beta), phi_(std::move(phi)), g_(std::move(g)),
      even_claimed_(even_claimed) {
    if (n_ < 2)
        throw std::invalid_argument("IntegrandSpec: n must be >= 2");
    if (!(beta_ > 0.0))
        throw std::invalid_argument("IntegrandSpec: beta must be positive");
    run_probes();
}

double IntegrandSpec::eval_phi(std::span<const double> x, double s) const {
    if (!(s > 0.0))
        throw DomainError("phi evaluated at non-positive support value", s);
    double v;
    if (const auto* pp = std::get_if<PowerPhi>(&phi_)) {
        double binds[18];
        for (int i = 0; i <= n_; ++i)
            binds[i] = x[i];
        binds[n_ + 1] = s;
        const double f = pp->f.eval(std::span<const double>(binds, n_ + 2));
        v = std::pow(f * std::pow(s, 1.0 - pp->p), beta_ / n_);
    } else {
        double binds[18];
        for (int i = 0; i <= n_; ++i)
            binds[i] = x[i];
        binds[n_ + 1] = s;
        v = std::get<ExprPhi>(phi_).e.eval(std::span<const double>(binds, n_ + 2));
    }
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("phi must be positive", v);
    return v;
}

double IntegrandSpec::eval_phi_pow_neg(std::span<const double> x, double s) const {
    if (const auto* pp = std::get_if<PowerPhi>(&phi_)) {
        if (!(s > 0.0))
            throw DomainError("phi evaluated at non-positive support value", s);
        double binds[18];
        for (int i = 0; i <= n_; ++i)
            binds[i] = x[i];
        binds[n_ + 1] = s;
        const double f = pp->f.eval(std::span<const double>(binds, n_ + 2));
        if (!(f > 0.0))
            throw DomainError("anisotropy factor f must be positive", f);
        const double v = std::pow(s, pp->p - 1.0) / f; // (f s^(1-p))^(-1)
        if (!std::isfinite(v))
            throw DomainError("phi^(-n/beta) overflow", s);
        return v;
    }
    return std::pow(eval_phi(x, s), -double(n_) / beta_);
}

double IntegrandSpec::eval_G(std::span<const double> y) const {
    double r2 = 0.0;
    for (int i = 0; i <= n_; ++i)
        r2 += y[i] * y[i];
    if (!(r2 > 0.0))
        throw DomainError("G evaluated at the zero vector", 0.0);
    double v;
    if (const auto* pg = std::get_if<PowerG>(&g_)) {
        v = std::pow(r2, 0.5 * (pg->q - n_ - 1.0) * beta_ / n_);
    } else {
        double binds[18];
        for (int i = 0; i <= n_; ++i)
            binds[i] = y[i];
        binds[n_ + 1] = std::sqrt(r2);
        v = std::get<ExprG>(g_).e.eval(std::span<const double>(binds, n_ + 2));
    }
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("G must be positive", v);
    return v;
}

double IntegrandSpec::eval_G_pow(std::span<const double> y) const {
    if (const auto* pg = std::get_if<PowerG>(&g_)) {
        double r2 = 0.0;
        for (int i = 0; i <= n_; ++i)
            r2 += y[i] * y[i];
        if (!(r2 > 0.0))
            throw DomainError("G evaluated at the zero vector", 0.0);
        const double v = std::pow(r2, 0.5 * (pg->q - n_ - 1.0));
        if (!std::isfinite(v))
            throw DomainError("G^(n/beta) overflow", std::sqrt(r2));
        return v;
    }
    return std::pow(eval_G(y), double(n_) / beta_);
}

std::optional<double> IntegrandSpec::p() const {
    if (const auto* pp = std::get_if<PowerPhi>(&phi_))
        return pp->p;
    return std::nullopt;
}

std::optional<double> IntegrandSpec::q() const {
    if (const auto* pg = std::get_if<PowerG>(&g_))
        return pg->q;
    return std::nullopt;
}

namespace {
// deterministic unit vectors and radii for the construction-time probes
struct ProbeRng {
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    double uniform() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return double((state >> 11) & ((1ULL << 53) - 1)) / double(1ULL << 53);
    }
    void unit_vector(int dim, double* out) {
        double n2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double u1 = std::max(uniform(), 1e-12), u2 = uniform();
            out[i] = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
            n2 += out[i] * out[i];
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (int i = 0; i < dim; ++i)
            out[i] *= inv;
    }
};
} // namespace

void IntegrandSpec::run_probes() const {
    ProbeRng rng;
    const int dim = n_ + 1;
    double x[17], y[17], mx[17];
    const int probes = 1000;
    for (int i = 0; i < probes; ++i) {
        rng.unit_vector(dim, x);
        const double s = std::exp(std::log(0.05) + rng.uniform() * std::log(20.0 / 0.05));
        const double r = std::exp(std::log(0.05) + rng.uniform() * std::log(20.0 / 0.05));
        for (int j = 0; j < dim; ++j)
            y[j] = r * x[j];
        const double pv = eval_phi(std::span<const double>(x, dim), s); // throws if <= 0
        const double gv = eval_G(std::span<const double>(y, dim));
        if (even_claimed_) {
            for (int j = 0; j < dim; ++j)
                mx[j] = -x[j];
            const double pv2 = eval_phi(std::span<const double>(mx, dim), s);
            if (std::abs(pv2 - pv) > 1e-12 * std::max(1.0, std::abs(pv)))
                throw std::invalid_argument(
                    "IntegrandSpec: phi claimed even but phi(-x,s) != phi(x,s)");
            for (int j = 0; j < dim; ++j)
                mx[j] = -y[j];
            const double gv2 = eval_G(std::span<const double>(mx, dim));
            if (std::abs(gv2 - gv) > 1e-12 * std::max(1.0, std::abs(gv)))
                throw std::invalid_argument(
                    "IntegrandSpec: G claimed even but G(-y) != G(y)");
        }
    }
}

double qstar(double q, int n) {
    if (!(q > 0.0))
        throw std::invalid_argument("qstar: q must be positive");
    if (q >= n + 1.0)
        return q / (q - n);
    if (q > 1.0)
        return n * q / (q - 1.0);
    return std::numeric_limits<double>::infinity();
}

PowerCaseSet classify_power_case(double p, double q, int n) {
    PowerCaseSet cs;
    cs.barrier = p > q;
    cs.general = (p > 0.0 && q <= 0.0) || (p >= 0.0 && q < 0.0);
    cs.even = (p > -1.0) || (q < 1.0) ||
              (q > 0.0 && p < 0.0 && -qstar(q, n) < p);
    return cs;
}

} // namespace gcflow
