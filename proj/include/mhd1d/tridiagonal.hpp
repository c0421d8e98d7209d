#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mhd1d/errors.hpp"

namespace mhd1d {

/// Thomas algorithm for a tridiagonal system.
///
/// lower[i] multiplies x[i-1] in row i (lower[0] is ignored), diag[i]
/// multiplies x[i], upper[i] multiplies x[i+1] (upper[n-1] is ignored).
/// Intended for the diagonally dominant systems the implicit sub-steps
/// assemble; a vanishing pivot raises LinearSolveError.
inline std::vector<double> tridiag_solve(const std::vector<double>& lower,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& upper,
                                         const std::vector<double>& rhs)
{
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
        throw ValidationError("tridiag_solve: band/rhs size mismatch");

    std::vector<double> c(n), d(n);
    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot))
        throw LinearSolveError("tridiag_solve: zero pivot at row 0");
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw LinearSolveError("tridiag_solve: zero pivot at row " + std::to_string(i));
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace mhd1d
