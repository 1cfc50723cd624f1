// Spherical discretizations of S^n with quadrature weights carrying the full
// surface measure and spectrally accurate covariant derivative operators.
//
// Two modes:
//   axisymmetric — any n >= 2; nodes are Gauss points of the weight
//     (1-t^2)^((n-2)/2) in t = cos(theta) on (-1,1) (Gauss-Legendre for
//     n = 2), so every integral over S^n of a function of theta is a plain
//     weighted sum. Differentiation works on the t variable through dense
//     barycentric matrices and chain rules; no node touches a pole, so
//     cot(theta) factors stay finite.
//   full2d — n = 2 only; tensor grid of Gauss-Legendre t-nodes by a uniform
//     periodic phi grid with trapezoidal weights. Derivatives combine a real
//     trigonometric transform in phi with per-mode t-differentiation; each
//     Fourier amplitude is divided by sin(theta)^(m mod 2) first, which keeps
//     the t-columns smooth through the poles for any smooth field.
//
// Node sets are exactly antipodally paired (theta symmetrized, n_phi even),
// which the monitors rely on for symmetry defects.

#pragma once

#include "gcflow/kernels.hpp"

#include <span>
#include <vector>

namespace gcflow {

enum class GridMode { axisymmetric, full2d };

struct GridDescriptor {
    GridMode mode = GridMode::axisymmetric;
    int n = 2;        // sphere dimension, nodes live on S^n in R^(n+1)
    int n_theta = 0;
    int n_phi = 0;    // 0 in axisymmetric mode
    int node_count = 0;
    double surface_area = 0.0; // |S^n|

    std::vector<double> theta, t, s; // per theta row; t = cos(theta), s = sin(theta)
    std::vector<double> phi;         // per phi column (full2d)
    std::vector<double> cos_phi, sin_phi; // exact antipodal structure enforced
    std::vector<double> weights;     // per node, sums to |S^n|
    std::vector<int> antipode;       // exact antipodal node pairing

    // Dense barycentric differentiation matrices in t (n_theta x n_theta)
    // plus the barycentric weights used for off-grid interpolation.
    std::vector<double> Dt, Dtt, bary;

    // Real trigonometric transform matrices (full2d); n_modes = n_phi/2 + 1.
    // fwd_* are n_phi x n_modes (amplitudes = U * fwd), inv_* are
    // n_modes x n_phi (field = A * inv_cos + B * inv_sin).
    int n_modes = 0;
    std::vector<double> fwd_cos, fwd_sin, inv_cos, inv_sin;

    // Per-row phi-mode cutoff: modes with m > mode_cut[row] carry no
    // resolvable content at that latitude and are dropped before
    // differentiation. Keeps the explicit time-step restriction at the level
    // the equator dictates instead of the first ring near the pole.
    std::vector<int> mode_cut;

    int dim() const { return n + 1; }
    int theta_row(int k) const { return mode == GridMode::full2d ? k / n_phi : k; }
    int phi_col(int k) const { return mode == GridMode::full2d ? k % n_phi : 0; }
    // Unit direction of node k as an (n+1)-vector (axisymmetric nodes lie in
    // the x1/x_{n+1} plane; the axis of symmetry is the last coordinate).
    void node_direction(int k, std::span<double> out) const;
    // Local angular spacing lower bound (for time-step control).
    double min_spacing() const;
};

GridDescriptor build_axisymmetric_grid(int n, int n_nodes);
GridDescriptor build_full2d_grid(int n_theta, int n_phi);

// Frame components of Du and of the covariant Hessian at the nodes.
// axisymmetric: du1 = u'(theta), h11 = u''(theta), h22 = u'(theta)cot(theta),
// du2 = h12 = 0. full2d: frame e1 = d_theta, e2 = (1/sin theta) d_phi,
// h11 = u_tt, h22 = u_pp/sin^2 + u_t cot, h12 = (u_tp - u_p cot)/sin.
struct DerivativeBundle {
    std::vector<double> du1, du2, h11, h12, h22;
};

DerivativeBundle covariant_derivatives(const GridDescriptor& grid,
                                       std::span<const double> u,
                                       kernels::Exec exec = kernels::default_exec());

// Sum of w_k * field_k with a deterministic compensated reduction.
// Throws std::invalid_argument on a non-finite sample.
double integrate(const GridDescriptor& grid, std::span<const double> field,
                 kernels::Exec exec = kernels::default_exec());

double sphere_surface_area(int n); // |S^n|

// Gauss-Legendre nodes/weights on (-1, 1); shared by the 1-D quadratures in
// the monitors module.
void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace gcflow
