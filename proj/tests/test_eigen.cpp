#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spcd/eigen.hpp"
#include "spcd/rng.hpp"
#include "spcd/sym_matrix.hpp"

using namespace spcd;

namespace {

SymMatrix wishart(int p, int n, Seed seed) {
    Rng rng(seed);
    DataMatrix X(n, p);
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
    return empirical_covariance(X);
}

}  // namespace

TEST_CASE("jacobi eigendecomposition reconstructs the matrix") {
    SymMatrix A = wishart(8, 20, stream_seed(201, 0));
    EigenDecomposition ed = jacobi_eigen(A);
    REQUIRE(ed.values.size() == 8);
    // ascending order
    for (std::size_t i = 1; i < ed.values.size(); ++i) CHECK(ed.values[i - 1] <= ed.values[i]);
    // A = V diag(w) V^T entrywise
    for (int i = 0; i < 8; ++i)
        for (int j = i; j < 8; ++j) {
            double s = 0.0;
            for (int m = 0; m < 8; ++m) s += ed.vectors[m][i] * ed.values[m] * ed.vectors[m][j];
            CHECK(s == doctest::Approx(A(i, j)).epsilon(1e-10).scale(1.0));
        }
    // orthonormal rows
    for (int a = 0; a < 8; ++a)
        for (int b = a; b < 8; ++b) {
            double dot = 0.0;
            for (int m = 0; m < 8; ++m) dot += ed.vectors[a][m] * ed.vectors[b][m];
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }
}

TEST_CASE("largest_eigenvalue agrees with the tridiagonal Sturm oracle") {
    for (int trial = 0; trial < 20; ++trial) {
        int p = 3 + trial;
        SymMatrix A = wishart(p, p + 5, stream_seed(202, static_cast<std::uint64_t>(trial)));
        EigenPair top = largest_eigenvalue(A);
        double ref = oracle::lambda_max(A);
        CHECK(top.value == doctest::Approx(ref).epsilon(1e-9));
        // residual check: ||Av - lambda v|| small
        std::vector<double> y(p, 0.0);
        A.apply(top.vector, y);
        double resid = 0.0;
        for (int i = 0; i < p; ++i) resid += (y[i] - top.value * top.vector[i]) *
                                             (y[i] - top.value * top.vector[i]);
        CHECK(std::sqrt(resid) <= 1e-6 * std::max(1.0, std::fabs(top.value)));
    }
}

TEST_CASE("largest_eigenvalue handles the large-p iterative path") {
    // above the Jacobi cutoff the block power path takes over; cross-check
    SymMatrix A = wishart(80, 120, stream_seed(203, 0));
    EigenPair top = largest_eigenvalue(A, 1e-11);
    double ref = oracle::lambda_max(A);
    CHECK(top.value == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("warm-started eigensolver tracks a drifting matrix") {
    SymMatrix A = wishart(24, 40, stream_seed(204, 0));
    std::vector<std::vector<double>> warm;
    double prev = largest_eigenvalue_warm(A, 1e-10, warm).value;
    CHECK(prev == doctest::Approx(oracle::lambda_max(A)).epsilon(1e-8));
    for (int step = 1; step <= 5; ++step) {
        SymMatrix B = soft_threshold(A, 0.02 * step);
        double v = largest_eigenvalue_warm(B, 1e-10, warm).value;
        CHECK(v == doctest::Approx(oracle::lambda_max(B)).epsilon(1e-8));
        CHECK(v <= prev + 1e-9);  // soft-thresholding shrinks the top eigenvalue here
        prev = v;
    }
}

TEST_CASE("identity and rank-one spikes have known spectra") {
    SymMatrix I = SymMatrix::identity(10);
    CHECK(largest_eigenvalue(I).value == doctest::Approx(1.0).epsilon(1e-12));

    // I + theta vv^T with unit v: lambda_max = 1 + theta
    SymMatrix A = SymMatrix::identity(10);
    std::vector<double> v(10, 0.0);
    v[2] = 0.6;
    v[7] = 0.8;
    for (int i = 0; i < 10; ++i)
        for (int j = i; j < 10; ++j) A.add(i, j, 0.9 * v[i] * v[j]);
    CHECK(largest_eigenvalue(A).value == doctest::Approx(1.9).epsilon(1e-10));
    CHECK(oracle::lambda_max(A) == doctest::Approx(1.9).epsilon(1e-10));
}

TEST_CASE("canonicalize_sign fixes an orientation") {
    std::vector<double> v = {-0.6, 0.0, 0.8};
    canonicalize_sign(v);
    std::vector<double> w = {0.6, 0.0, -0.8};
    canonicalize_sign(w);
    CHECK(v == w);
}

TEST_CASE("SolverError carries its certified interval") {
    SolverError e("no convergence", 1.25, 1.5);
    CHECK(e.lower() == 1.25);
    CHECK(e.upper() == 1.5);
    CHECK(std::string(e.what()) == "no convergence");
}
