#pragma once

// Unit conventions used throughout the toolkit:
//   frequencies   ordinary frequency (value / 2pi) in MHz
//   energies      E/h in MHz
//   lengths       micrometres
//   times         microseconds
//   C6, C3        GHz um^6, GHz um^3 (as C/h), stored signed

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rydpol {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27; // kg
inline constexpr double kRb87MassU = 86.909;                 // u
inline constexpr double kGhzToMhz = 1.0e3;
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

/// Van der Waals and resonant dipole-dipole coefficients for a pair state.
/// Radius formulas use magnitudes; Hamiltonians keep the sign.
struct PairCoefficients {
    double c6 = -140.0;           // GHz um^6, 60s60s
    double c3 = -14.3;            // GHz um^3, 60s 59p3/2
    double dipole_moment = 1634.9;  // e a0, sqrt(2/9) * 3468
};

struct RetrievalWindow {
    double start = 0.85;  // us
    double end = 1.15;    // us
};

/// Every physical parameter of the store / rotate / retrieve experiment.
struct ExperimentConfig {
    double cloud_wz = 30.0;            // um, axial standard deviation
    double cloud_wr = 2.8;             // um, radial standard deviation
    double temperature = 100.0;        // uK
    double atom_mass = constants::kRb87MassU;  // u
    double signal_wavelength = 780.2;  // nm
    double control_wavelength = 480.0; // nm
    double trap_wavelength = 910.0;    // nm
    double omega_c = 3.0;              // MHz
    double omega_s = 1.2;              // MHz
    double eit_width = 1.0;            // MHz
    int n_principal = 60;
    double repetition_period = 6.0;    // us
    double storage_time = 0.9;         // us
    RetrievalWindow retrieval_window;
    double detection_efficiency = 0.18;
    double background_rate = 0.0065;   // counts / us inside the window
    double mean_input_photons = 10.0;

    // Calibration inputs for the Monte Carlo protocol.
    double write_efficiency = 0.345;     // gives mean N ~ 3 at the default geometry
    double retrieval_efficiency = 0.04;  // per polariton, before detection
    double directional_ratio_min = 5.0;  // warn when R_o < ratio * signal wavelength

    PairCoefficients pair;
};

enum class ScalingLaw { c6_n11, dipole_n2, lifetime_n3, qubit_fom_n5 };

ScalingLaw parse_scaling_law(std::string_view name);
std::string_view to_string(ScalingLaw law);

/// Optical blockade radius (|C6| / Delta_EIT)^(1/6) in um.
double optical_blockade_radius(double c6_ghz_um6, double eit_width_mhz);

/// Microwave blockade radius (|C3| / Omega_mu)^(1/3) in um.
double microwave_blockade_radius(double c3_ghz_um3, double omega_mu_mhz);

/// Resonant dipole-dipole interaction |C3| / r^3 in MHz.
double dipole_interaction(double c3_ghz_um3, double r_um);

/// Spin-wave lifetime 1 / (k_eff v_rms) for counter-propagating signal and
/// control beams. Returns +infinity when the two wavelengths coincide.
double motional_dephasing_time(const ExperimentConfig& config);

/// value_ref * (n / n_ref)^p with the exponent set by `law`.
double rydberg_scaling(int n, int n_ref, double value_ref, ScalingLaw law);

/// Characteristic interaction at the optical blockade radius, |C3| / R_o^3.
double characteristic_interaction(const ExperimentConfig& config);

/// Throws std::invalid_argument naming the first offending field.
void validate(const ExperimentConfig& config);

/// Soft diagnostics (no exception), e.g. the directional-emission condition
/// R_o >> lambda.
std::vector<std::string> config_warnings(const ExperimentConfig& config);

}  // namespace rydpol
