#pragma once

#include <cmath>
#include <vector>

#include "capflow/errors.hpp"

namespace capflow {

/// Solve the cyclic tridiagonal system
///   sub[j] x[j-1] + diag[j] x[j] + sup[j] x[j+1] = rhs[j],  j mod n,
/// by the Thomas algorithm plus a Sherman-Morrison rank-1 correction for the
/// periodic corner entries. Requires n >= 3 and a nonsingular system; the
/// IMEX caller always supplies strictly diagonally dominant rows.
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub,
                                                    const std::vector<double>& diag,
                                                    const std::vector<double>& sup,
                                                    const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n < 3 || sub.size() != n || sup.size() != n || rhs.size() != n)
        throw ValidationError("cyclic tridiagonal solve needs four equal-length bands, n >= 3");

    // B is the plain tridiagonal matrix with modified first/last diagonal
    // entries; A = B + u v^T restores the two corner entries.
    const double gamma = -diag[0];
    std::vector<double> d(n);
    d[0] = diag[0] - gamma;
    d[n - 1] = diag[n - 1] - sub[0] * sup[n - 1] / gamma;
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = diag[j];

    auto thomas = [&](const std::vector<double>& b) {
        std::vector<double> c(n), x(n);
        double piv = d[0];
        if (piv == 0.0) throw NumericalError("cyclic tridiagonal solve: zero pivot");
        c[0] = sup[0] / piv;
        x[0] = b[0] / piv;
        for (std::size_t j = 1; j < n; ++j) {
            piv = d[j] - sub[j] * c[j - 1];
            if (piv == 0.0) throw NumericalError("cyclic tridiagonal solve: zero pivot");
            c[j] = (j + 1 < n) ? sup[j] / piv : 0.0;
            x[j] = (b[j] - sub[j] * x[j - 1]) / piv;
        }
        for (std::size_t j = n - 1; j-- > 0;) x[j] -= c[j] * x[j + 1];
        return x;
    };

    const std::vector<double> y = thomas(rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    const std::vector<double> z = thomas(u);

    // v = (1, 0, ..., 0, sub[0]/gamma)
    const double vy = y[0] + sub[0] / gamma * y[n - 1];
    const double vz = z[0] + sub[0] / gamma * z[n - 1];
    const double denom = 1.0 + vz;
    if (!std::isfinite(denom) || std::abs(denom) <= 1e-12 * (1.0 + std::abs(vz)))
        throw NumericalError("cyclic tridiagonal solve: singular correction");

    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = y[j] - vy / denom * z[j];
    return x;
}

}  // namespace capflow
