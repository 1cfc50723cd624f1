#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gcflow/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gcflow;

namespace {
// deterministic pseudo-random doubles in [-1, 1)
struct Lcg {
    std::uint64_t state;
    explicit Lcg(std::uint64_t seed) : state(seed) {}
    double next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return 2.0 * (double((state >> 11) & ((1ULL << 53) - 1)) / double(1ULL << 53)) - 1.0;
    }
};

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    Lcg rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next();
    return v;
}
} // namespace

TEST_CASE("matmul parallel matches serial bit for bit") {
    const int rows = 37, inner = 53, cols = 29;
    auto a = random_vector(std::size_t(rows) * inner, 1);
    auto b = random_vector(std::size_t(inner) * cols, 2);
    std::vector<double> cs(std::size_t(rows) * cols), cp(cs.size());
    kernels::matmul(kernels::Exec::serial, a, b, cs, rows, inner, cols);
    kernels::matmul(kernels::Exec::parallel, a, b, cp, rows, inner, cols);
    for (std::size_t i = 0; i < cs.size(); ++i)
        CHECK(cs[i] == cp[i]);
}

TEST_CASE("matvec parallel matches serial bit for bit") {
    const int rows = 211, cols = 173;
    auto a = random_vector(std::size_t(rows) * cols, 3);
    auto x = random_vector(cols, 4);
    std::vector<double> ys(rows), yp(rows);
    kernels::matvec(kernels::Exec::serial, a, x, ys, rows, cols);
    kernels::matvec(kernels::Exec::parallel, a, x, yp, rows, cols);
    for (int i = 0; i < rows; ++i)
        CHECK(ys[i] == yp[i]);
}

TEST_CASE("weighted_sum is deterministic across exec policies and thread counts") {
    auto w = random_vector(10007, 5);
    auto f = random_vector(10007, 6);
    const double ref = kernels::weighted_sum(kernels::Exec::serial, w, f);
    CHECK(kernels::weighted_sum(kernels::Exec::parallel, w, f) == ref);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    CHECK(kernels::weighted_sum(kernels::Exec::parallel, w, f) == ref);
    omp_set_num_threads(saved);
#endif
}

TEST_CASE("compensated_sum beats naive summation on an ill-conditioned input") {
    // alternating large/small terms whose exact sum is n_small * eps_term
    std::vector<double> v;
    const double big = 1e16, small = 1.0;
    for (int i = 0; i < 1000; ++i) {
        v.push_back(big);
        v.push_back(small);
        v.push_back(-big);
    }
    const double s = kernels::compensated_sum(v);
    CHECK(s == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("max_abs agrees between policies") {
    auto v = random_vector(5000, 7);
    v[1234] = -3.5;
    CHECK(kernels::max_abs(kernels::Exec::serial, v) == 3.5);
    CHECK(kernels::max_abs(kernels::Exec::parallel, v) == 3.5);
}
