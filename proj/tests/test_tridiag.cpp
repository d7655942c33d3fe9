#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "capflow/cyclic_tridiagonal.hpp"

using namespace capflow;

namespace {

// Dense Gaussian elimination with partial pivoting, used as the oracle.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

std::vector<std::vector<double>> cyclic_matrix(const std::vector<double>& sub,
                                               const std::vector<double>& diag,
                                               const std::vector<double>& sup) {
    const std::size_t n = diag.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        a[j][j] = diag[j];
        a[j][(j + 1) % n] = sup[j];
        a[j][(j + n - 1) % n] = sub[j];
    }
    return a;
}

}  // namespace

TEST_CASE("Cyclic solve agrees with dense elimination on random dominant systems") {
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> off(-1.0, 1.0);
    for (std::size_t n : {3u, 5u, 16u, 257u}) {
        std::vector<double> sub(n), diag(n), sup(n), rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            sub[j] = off(rng);
            sup[j] = off(rng);
            diag[j] = 4.0 + off(rng);  // strictly diagonally dominant
            rhs[j] = off(rng);
        }
        const auto x = solve_cyclic_tridiagonal(sub, diag, sup, rhs);
        const auto ref = dense_solve(cyclic_matrix(sub, diag, sup), rhs);
        for (std::size_t j = 0; j < n; ++j)
            REQUIRE_THAT(x[j], Catch::Matchers::WithinAbs(ref[j], 1e-12));
    }
}

TEST_CASE("Cyclic solve reproduces a hand-checked residual") {
    // IMEX-shaped bands: diag = 1 + 2a, off-diagonals = -a.
    const std::size_t n = 64;
    const double a = 0.37;
    std::vector<double> sub(n, -a), diag(n, 1.0 + 2.0 * a), sup(n, -a), rhs(n);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = 2.0 + std::sin(0.3 * static_cast<double>(j));
    const auto x = solve_cyclic_tridiagonal(sub, diag, sup, rhs);
    for (std::size_t j = 0; j < n; ++j) {
        const double res = sub[j] * x[(j + n - 1) % n] + diag[j] * x[j] + sup[j] * x[(j + 1) % n];
        REQUIRE_THAT(res, Catch::Matchers::WithinAbs(rhs[j], 1e-13));
    }
}

TEST_CASE("Constant-vector solutions pass through row sums") {
    // If every row sums to s and rhs = s, the solution is all ones.
    const std::size_t n = 32;
    std::vector<double> sub(n, -0.25), diag(n, 2.0), sup(n, -0.25), rhs(n, 1.5);
    const auto x = solve_cyclic_tridiagonal(sub, diag, sup, rhs);
    for (double v : x) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(1.0, 1e-14));
}

TEST_CASE("Cyclic solve validates shapes and rejects singular systems") {
    std::vector<double> b3(3, 1.0), b2(2, 1.0);
    REQUIRE_THROWS_AS(solve_cyclic_tridiagonal(b2, b2, b2, b2), ValidationError);
    REQUIRE_THROWS_AS(solve_cyclic_tridiagonal(b2, b3, b3, b3), ValidationError);

    // Discrete periodic Laplacian: singular (constants in the nullspace).
    const std::size_t n = 8;
    std::vector<double> sub(n, 1.0), diag(n, -2.0), sup(n, 1.0), rhs(n, 1.0);
    REQUIRE_THROWS_AS(solve_cyclic_tridiagonal(sub, diag, sup, rhs), NumericalError);
}
