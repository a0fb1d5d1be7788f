#pragma once

#include <string>

namespace wigmd::units {

// CODATA 2018 exact values.
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double h_planck    = 6.62607015e-34;  // J s
inline constexpr double hbar_si     = 1.054571817e-34; // J s
inline constexpr double c_light_cm  = 2.99792458e10;   // cm/s

// hc in J cm: converts wavenumbers (cm^-1) to Joules.
inline constexpr double hc_joule_cm = h_planck * c_light_cm;

double wavenumber_to_joule(double cm1);
double kelvin_to_joule(double kelvin);
double wavenumber_to_kelvin(double cm1);

// Fixed parameters of the Xe + I2 system. Energies are stored in both the
// cm^-1 and Kelvin forms they are usually quoted in; validate() checks the
// two forms against each other.
struct PhysicalConstants {
    double eps_xexe_cm1 = 154.00;  // Xe-Xe well depth
    double eps_xexe_K   = 221.7;
    double sigma_xexe_A = 3.930;   // Xe effective diameter
    double eps_i2i2_cm1 = 382.27;  // I2-I2 well depth
    double eps_i2i2_K   = 550.0;
    double sigma_i2i2_A = 4.982;
    double m_xe_g       = 2.18e-22;  // solvent atom mass
    double m_i2_g       = 4.22e-22;  // solute molecule mass
    double morse_D_cm1  = 1.2547e4;  // vibrational well depth
    double morse_beta_invA = 1.8576; // vibrational range parameter

    void validate() const;  // throws std::invalid_argument on inconsistency

    // SI derived forms. The Kelvin energies are canonical for scaling.
    double eps_xexe_J() const { return kelvin_to_joule(eps_xexe_K); }
    double eps_i2i2_J() const { return kelvin_to_joule(eps_i2i2_K); }
    double sigma_xexe_m() const { return sigma_xexe_A * 1e-10; }
    double m_xe_kg() const { return m_xe_g * 1e-3; }
    double m_i2_kg() const { return m_i2_g * 1e-3; }
};

// Dimensionless constants in solvent-scaled MD units
// (m_Xe = sigma_Xe-Xe = eps_Xe-Xe = 1).
struct ReducedConstants {
    double m_i2;      // I2 molecule mass
    double mu_i2;     // I2 vibrational reduced mass (= m_i2/4)
    double sigma_i2;  // I2-I2 LJ diameter
    double eps_i2;    // I2-I2 LJ well depth
    double D;         // Morse well depth
    double beta;      // Morse range parameter
    double hbar;      // Planck constant / 2pi
    double eta;       // time scale factor, s^-1 (physical; t* = eta t)

    static ReducedConstants from(const PhysicalConstants& pc);

    // Lorentz-Berthelot combination for the I2-Xe pair
    double eps_i2xe() const;
    double sigma0_i2xe() const;
};

enum class Kind { length, time, frequency, density, temperature, energy, mass };

Kind kind_from_name(const std::string& name);  // throws on unknown name

// Physical-side units per kind: length m, time s, frequency s^-1,
// density g/cm^3 (mass density), temperature K, energy J, mass kg.
double reduce(const PhysicalConstants& pc, double value, Kind kind);
double expand(const PhysicalConstants& pc, double value, Kind kind);

} // namespace wigmd::units
