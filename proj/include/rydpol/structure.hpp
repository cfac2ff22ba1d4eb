#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rydpol {

/// Quantum-defect description of an alkali Rydberg series,
/// delta(n) = delta0 + delta2 / (n - delta0)^2, keyed by (l, 2j).
/// Channels absent from the table are treated as hydrogenic (delta = 0).
struct QuantumDefectModel {
    double rydberg_constant = 0.0;  // GHz
    std::map<std::pair<int, int>, std::pair<double, double>> defects;

    /// Rb-87 defaults (s, p1/2, p3/2, d, f series) with the mass-corrected
    /// Rydberg constant.
    static QuantumDefectModel rubidium87();
    /// delta = 0 everywhere, Rydberg constant R_inf c.
    static QuantumDefectModel hydrogenic(double rydberg_ghz = 3289841.960250);

    double defect(int n, int l, double j) const;
    double effective_n(int n, int l, double j) const;
};

/// Reduced radial solution u(r) = r R(r) on a strictly increasing grid (a0).
struct RadialWavefunction {
    int n = 0;
    int l = 0;
    int twice_j = 1;
    double effective_n = 0.0;
    std::vector<double> grid;
    std::vector<double> u;

    double j() const { return 0.5 * twice_j; }
    int node_count() const;
    /// Trapezoid integral of u^2 on the stored grid.
    double norm() const;
    /// <r^power> on the stored grid.
    double expectation_r(double power = 1.0) const;
};

struct GridSpec {
    double log_step = 0.002;            // step in ln r
    double inner_fraction = 0.05;       // inner cutoff = inner_fraction * n^2 (a0)
    double outer_factor = 2.5;          // r_out = outer_factor * n * (n + 15)
    double min_points_per_wavelength = 10.0;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// -Ry / (n - delta(n))^2 in GHz.
double binding_energy(const QuantumDefectModel& model, int n, int l, double j);

/// |E(b) - E(a)| in GHz.
double transition_frequency(const QuantumDefectModel& model, int n_a, int l_a, double j_a, int n_b,
                            int l_b, double j_b);

/// Inward Numerov integration of the pure-Coulomb radial equation at the
/// quantum-defect energy, on a logarithmic grid. The divergent inner region
/// is cut off and the result is normalized to unit trapezoid norm.
RadialWavefunction numerov_wavefunction(const QuantumDefectModel& model, int n, int l, double j,
                                        const GridSpec& spec = {});

/// Integral of u_a r u_b over the overlap of the two grids (e a0).
/// Both functions are linearly interpolated onto the merged grid, so the
/// result is exactly symmetric in its arguments.
double radial_matrix_element(const RadialWavefunction& a, const RadialWavefunction& b);

double transition_dipole(double radial_ea0, double angular_factor);

}  // namespace rydpol
