#include "gcflow/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gcflow::kernels {

namespace {
std::atomic<Exec> g_default{Exec::parallel};

inline void matmul_rows(std::span<const double> a, std::span<const double> b,
                        std::span<double> c, int inner, int cols,
                        int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
        double* ci = c.data() + static_cast<std::size_t>(i) * cols;
        std::fill(ci, ci + cols, 0.0);
        const double* ai = a.data() + static_cast<std::size_t>(i) * inner;
        for (int k = 0; k < inner; ++k) {
            const double aik = ai[k];
            const double* bk = b.data() + static_cast<std::size_t>(k) * cols;
            for (int j = 0; j < cols; ++j)
                ci[j] += aik * bk[j];
        }
    }
}
} // namespace

Exec default_exec() { return g_default.load(std::memory_order_relaxed); }
void set_default_exec(Exec e) { g_default.store(e, std::memory_order_relaxed); }

void matmul(Exec e, std::span<const double> a, std::span<const double> b,
            std::span<double> c, int rows, int inner, int cols) {
    assert(a.size() >= static_cast<std::size_t>(rows) * inner);
    assert(b.size() >= static_cast<std::size_t>(inner) * cols);
    assert(c.size() >= static_cast<std::size_t>(rows) * cols);
    if (e == Exec::serial) {
        matmul_rows(a, b, c, inner, cols, 0, rows);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i)
        matmul_rows(a, b, c, inner, cols, i, i + 1);
#else
    matmul_rows(a, b, c, inner, cols, 0, rows);
#endif
}

void matvec(Exec e, std::span<const double> a, std::span<const double> x,
            std::span<double> y, int rows, int cols) {
    assert(a.size() >= static_cast<std::size_t>(rows) * cols);
    assert(x.size() >= static_cast<std::size_t>(cols));
    assert(y.size() >= static_cast<std::size_t>(rows));
    auto row_dot = [&](int i) {
        const double* ai = a.data() + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (int j = 0; j < cols; ++j)
            acc += ai[j] * x[j];
        y[i] = acc;
    };
    if (e == Exec::serial) {
        for (int i = 0; i < rows; ++i) row_dot(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) row_dot(i);
#else
    for (int i = 0; i < rows; ++i) row_dot(i);
#endif
}

void parallel_for(Exec e, std::size_t count, const std::function<void(std::size_t)>& body) {
    if (e == Exec::serial) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double weighted_sum(Exec e, std::span<const double> w, std::span<const double> f) {
    assert(w.size() == f.size());
    const std::size_t n = w.size();
    std::vector<double> prod(n);
    parallel_for(e, n, [&](std::size_t i) { prod[i] = w[i] * f[i]; });
    return compensated_sum(prod);
}

double max_abs(Exec e, std::span<const double> values) {
    const std::size_t n = values.size();
    if (e == Exec::serial || n < 1024) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double m = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : m)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        m = std::max(m, std::abs(values[i]));
#else
    for (double v : values) m = std::max(m, std::abs(v));
#endif
    return m;
}

} // namespace gcflow::kernels
