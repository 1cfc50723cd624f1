// Data-parallel building blocks shared by the grid, geometry and flow code.
//
// Every kernel exists twice: a plain serial loop (the reference) and an
// OpenMP variant. The parallel variants split work only across independent
// output elements; every reduction runs in a fixed serial order, so results
// are bit-identical for any thread count. bench_kernels compares the two.

#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace gcflow::kernels {

enum class Exec { serial, parallel };

// Process-wide default used when callers do not pass a policy.
Exec default_exec();
void set_default_exec(Exec e);

// C = A * B, row-major dense; A is rows x inner, B is inner x cols.
void matmul(Exec e, std::span<const double> a, std::span<const double> b,
            std::span<double> c, int rows, int inner, int cols);

// y = A * x, row-major dense.
void matvec(Exec e, std::span<const double> a, std::span<const double> x,
            std::span<double> y, int rows, int cols);

// body(i) for i in [0, count); body must be pure per index.
void parallel_for(Exec e, std::size_t count, const std::function<void(std::size_t)>& body);

// Neumaier-compensated serial sum; deterministic for fixed input order.
double compensated_sum(std::span<const double> values);

// sum_k w[k] * f[k]; products are formed in parallel, the reduction is a
// serial compensated sum over the natural index order.
double weighted_sum(Exec e, std::span<const double> w, std::span<const double> f);

// max_k |values[k]|.
double max_abs(Exec e, std::span<const double> values);

} // namespace gcflow::kernels
