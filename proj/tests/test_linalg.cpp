#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coxspec/linalg.hpp"
#include "support/oracles.hpp"

using namespace coxspec;

namespace {

CMat random_cmat(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
    return m;
}

} // namespace

TEST_CASE("lu_det agrees with cofactor expansion") {
    std::mt19937_64 rng(101);
    for (int n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            const CMat m = random_cmat(rng, n);
            const cplx lu = lu_det(m);
            const cplx co = testing::cofactor_det(m);
            REQUIRE(std::abs(lu - co) <= 1e-11 * (1.0 + std::abs(co)));
        }
}

TEST_CASE("principal minors match cofactor minors") {
    std::mt19937_64 rng(102);
    const CMat m = random_cmat(rng, 4);
    for (unsigned mask = 0; mask < 16; ++mask) {
        const cplx a = principal_minor_det(m, mask);
        const cplx b = testing::cofactor_det(m, mask);
        REQUIRE(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("lu_solve produces small residuals and lu_inverse inverts") {
    std::mt19937_64 rng(103);
    const int n = 5;
    const CMat m = random_cmat(rng, n);
    std::vector<cplx> b(n);
    for (auto& v : b) v = cplx(1.0, -0.5);
    const std::vector<cplx> x = lu_solve(m, b);
    for (int i = 0; i < n; ++i) {
        cplx r = -b[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) r += m(i, j) * x[static_cast<size_t>(j)];
        REQUIRE(std::abs(r) < 1e-11);
    }
    const CMat inv = lu_inverse(m);
    const CMat prod = m * inv;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            REQUIRE(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-11);
}

TEST_CASE("jacobi eigenvalues: diagonal case and known 2x2") {
    RMat d(3);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 0.5;
    const std::vector<double> ev = jacobi_eigenvalues(d);
    REQUIRE(ev[0] == Catch::Approx(-1.0));
    REQUIRE(ev[1] == Catch::Approx(0.5));
    REQUIRE(ev[2] == Catch::Approx(3.0));

    // [[2,1],[1,2]] has eigenvalues 1 and 3
    RMat m(2);
    m(0, 0) = m(1, 1) = 2.0;
    m(0, 1) = m(1, 0) = 1.0;
    const std::vector<double> ev2 = jacobi_eigenvalues(m);
    REQUIRE(ev2[0] == Catch::Approx(1.0));
    REQUIRE(ev2[1] == Catch::Approx(3.0));
}

TEST_CASE("jacobi eigenvectors: A q = lambda q and orthonormality") {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(trial % 4);
        RMat a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a(i, j) = a(j, i) = d(rng);
        RMat q;
        const std::vector<double> ev = jacobi_eigenvalues(a, &q);
        for (size_t i = 1; i < ev.size(); ++i) REQUIRE(ev[i] >= ev[i - 1]);
        for (int col = 0; col < n; ++col) {
            for (int row = 0; row < n; ++row) {
                double aq = 0.0;
                for (int k = 0; k < n; ++k) aq += a(row, k) * q(k, col);
                REQUIRE(aq == Catch::Approx(ev[static_cast<size_t>(col)] * q(row, col)).margin(1e-10));
            }
        }
        for (int c1 = 0; c1 < n; ++c1)
            for (int c2 = 0; c2 < n; ++c2) {
                double dot = 0.0;
                for (int k = 0; k < n; ++k) dot += q(k, c1) * q(k, c2);
                REQUIRE(dot == Catch::Approx(c1 == c2 ? 1.0 : 0.0).margin(1e-12));
            }
    }
}
