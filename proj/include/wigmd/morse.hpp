#pragma once

#include <span>
#include <vector>

#include "wigmd/units.hpp"

namespace wigmd::morse {

// Morse oscillator in reduced units: V(q) = D (1 - exp(-beta (q - q0)))^2.
struct MorseSpec {
    double D;
    double beta;
    double q0 = 0.0;
    double mu;
    double hbar;

    static MorseSpec i2(const units::ReducedConstants& rc);

    void validate() const;  // throws std::invalid_argument

    // lambda = sqrt(2 mu D) / (beta hbar); controls the number of bound states
    double lambda() const;
    // harmonic frequency at the well bottom, sqrt(2 beta^2 D / mu)
    double omega() const;
    double period() const;
};

double potential(const MorseSpec& spec, double q);
double force(const MorseSpec& spec, double q);  // -dV/dq

// floor(lambda - 1/2); throws std::domain_error when no state is bound
int bound_count(const MorseSpec& spec);

// E_n = hbar w (n + 1/2) - [hbar w (n + 1/2)]^2 / (4 D); n in [0, bound_count)
double eigenenergy(const MorseSpec& spec, int n);

// Normalized bound-state amplitude psi_n on the given strictly increasing grid.
// Throws std::runtime_error when the grid misses more than 1e-4 of the norm.
std::vector<double> eigenfunction(const MorseSpec& spec, int n, std::span<const double> q_grid);

// Default tabulation grid [q0 - 1.5/beta, q0 + 6/beta].
std::vector<double> default_grid(const MorseSpec& spec, int points = 2048);

} // namespace wigmd::morse
