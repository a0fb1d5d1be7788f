#pragma once

// Independent numerical oracles used by the tests. Everything here checks the
// library from the outside: finite differences for forces, quadrature for
// matrix elements, and a sinc-DVR grid diagonalization for the Morse spectrum.

#include <lapacke.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wigmd/morse.hpp"

namespace oracles {

// central finite difference of a scalar function
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// trapezoidal quadrature on a uniform grid
inline double trapezoid(const std::vector<double>& values, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) s += 0.5 * (values[i] + values[i + 1]);
    return s * h;
}

// Lowest eigenvalues of the 1-D Hamiltonian H = -hbar^2/(2 mu) d2/dq2 + V(q)
// on a uniform grid: sinc-DVR kinetic matrix plus diagonal potential, dense
// symmetric diagonalization (LAPACK dsyevd, eigenvalues only).
inline std::vector<double> grid_diagonalization(const wigmd::morse::MorseSpec& spec, int n_points,
                                                int n_eigenvalues) {
    const auto grid = wigmd::morse::default_grid(spec, n_points);
    const double h = grid[1] - grid[0];
    const double kin = spec.hbar * spec.hbar / (2.0 * spec.mu * h * h);

    std::vector<double> ham(std::size_t(n_points) * n_points, 0.0);
    for (int i = 0; i < n_points; ++i) {
        ham[std::size_t(i) * n_points + i] =
            kin * (M_PI * M_PI / 3.0) + wigmd::morse::potential(spec, grid[i]);
        for (int j = 0; j < i; ++j) {
            const int d = i - j;
            const double t = kin * 2.0 * ((d % 2) ? -1.0 : 1.0) / (double(d) * double(d));
            ham[std::size_t(i) * n_points + j] = t;
            ham[std::size_t(j) * n_points + i] = t;
        }
    }

    std::vector<double> eigenvalues(n_points);
    const int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', n_points, ham.data(), n_points,
                                   eigenvalues.data());
    if (info != 0) throw std::runtime_error("grid_diagonalization: dsyev failed");
    eigenvalues.resize(n_eigenvalues);
    return eigenvalues;
}

} // namespace oracles
