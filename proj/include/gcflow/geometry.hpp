// Convex-body kernel in the support-function gauge: principal curvature
// radii b = D^2 u + u I, sigma_n = det b, position vector X = Du + u x,
// radial function rho, polar dual, and the Gauss-map Jacobian identities.

#pragma once

#include "gcflow/grid.hpp"

#include <span>
#include <vector>

namespace gcflow {

struct SupportFunction {
    const GridDescriptor* grid = nullptr;
    std::vector<double> values;
};

SupportFunction make_sphere(const GridDescriptor& grid, double radius);
// Centered ellipsoid with semi-axes (a, b, c) along the coordinate axes;
// axisymmetric grids require a == b (n = 2 only).
SupportFunction make_ellipsoid(const GridDescriptor& grid, double a, double b, double c);

struct BodyGeometry {
    // principal-radii matrix in the orthonormal frame: axisymmetric b11 has
    // multiplicity 1 and b22 multiplicity n-1; full2d is the symmetric 2x2.
    std::vector<double> b11, b22, b12;
    std::vector<double> min_eig;  // smallest eigenvalue of b per node
    std::vector<double> sigma_n;  // product of the curvature radii
    std::vector<double> X;        // node_count x (n+1), row-major
    std::vector<double> rho;      // |X| = sqrt(u^2 + |Du|^2)
    std::vector<double> jac;      // u sigma_n / rho^(n+1), |Jac A*|
    DerivativeBundle deriv;
    double convexity_margin = 0.0; // min over nodes of min_eig
    double min_u = 0.0, max_u = 0.0, min_rho = 0.0, max_rho = 0.0;
};

// Throws std::invalid_argument for non-positive u or non-finite derivatives.
// Loss of convexity is reported through min_eig/convexity_margin, not thrown.
BodyGeometry geometry_of(const SupportFunction& u,
                         kernels::Exec exec = kernels::default_exec());

// Spectral interpolant of a support function plus the radial-function
// evaluator. rho(xi) = min over the sphere of u(x)/<x, xi>; the minimum is
// located by a scan over grid nodes followed by local quadratic-pattern
// refinement of the interpolated objective, so the result is limited by the
// smoothness of u, not by the node spacing.
class SupportInterpolant {
public:
    SupportInterpolant(const SupportFunction& u,
                       kernels::Exec exec = kernels::default_exec());

    double eval(double theta, double phi) const; // support value off-grid
    double radial(std::span<const double> xi) const;

private:
    const GridDescriptor* grid_;
    std::vector<double> u_;
    std::vector<double> va_, vb_; // parity-reduced mode amplitudes (full2d)
    double radial_axisymmetric(double axis_angle) const;
    double radial_full2d(std::span<const double> xi) const;
};

double radial_function_at(const SupportFunction& u, std::span<const double> xi);

// u*(x_k) = 1 / rho(x_k) on the same grid.
SupportFunction polar_dual(const SupportFunction& u,
                           kernels::Exec exec = kernels::default_exec());

struct JacobianReport {
    double integral;           // ∫ u sigma_n / rho^(n+1) dx
    double expected;           // |S^n|
    double integral_defect;    // |integral - expected|
    double max_product_defect; // max_k ||Jac A|(xi_k) |Jac A*|(x_k) - 1|
};

JacobianReport jacobian_checks(const SupportFunction& u,
                               kernels::Exec exec = kernels::default_exec());

} // namespace gcflow
