#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rydpol {

enum class ModelId { lorentzian, rabi_collective };

ModelId parse_model_id(std::string_view name);
std::string_view to_string(ModelId id);

/// Peak value offset + amplitude at x = center.
double lorentzian(double x, double amplitude, double center, double fwhm, double offset);

struct RabiParams {
    double amplitude = 1.0;
    double n_polaritons = 1.0;
    double omega_env = 1.0;    // MHz
    double omega_decay = 1.0;  // MHz
    double background = 0.0;
};

/// A tanh(w/w_env) [cos^2(pi w t)]^N + (1 - tanh(w/w_env)) A exp(-w/w_decay) + B,
/// w in MHz, t in us.
double rabi_collective_model(double omega, double t_pulse, const RabiParams& p);

/// A model with its parameter table. `fixed` parameters keep their initial
/// value; the others stay inside [lower, upper].
struct ModelSpec {
    ModelId id = ModelId::lorentzian;
    std::vector<std::string> names;
    std::vector<double> initial;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<bool> fixed;
    double pulse_duration = 0.0;  // us, rabi_collective only

    static ModelSpec lorentzian_spec();
    static ModelSpec rabi_collective_spec(double pulse_duration_us);

    std::size_t parameter_count() const { return names.size(); }
    double evaluate(double x, std::span<const double> params) const;
    /// Throws std::invalid_argument if the table is inconsistent.
    void check() const;
    std::size_t index_of(std::string_view name) const;
};

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
};

enum class FitStatus { converged, small_step, max_iterations };
std::string_view to_string(FitStatus status);

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> parameters;
    /// 1 sigma from the inverse curvature scaled by the reduced chi^2.
    std::vector<double> errors;
    /// Unscaled inverse curvature (J^T J)^-1 over the free parameters, in
    /// the full parameter indexing; fixed rows and columns are zero.
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    FitStatus status = FitStatus::max_iterations;
    /// Cost after every accepted step, starting with the initial cost.
    std::vector<double> cost_history;
};

struct FitOptions {
    int max_iterations = 500;
    double initial_damping = 1e-3;
    double gradient_tolerance = 1e-8;  // relative to (1 + cost)
    double step_tolerance = 1e-14;
    double jacobian_step = 1e-6;       // relative central-difference step
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Weighted model Jacobian d f(x_i) / d p_j by central differences with
/// relative step `step`.
Eigen::MatrixXd numeric_jacobian(const ModelSpec& model, std::span<const double> params,
                                 std::span<const double> x, double step);

/// Levenberg-Marquardt minimization of sum ((y - f(x)) / sigma)^2 starting
/// from model.initial.
FitResult fit(const ModelSpec& model, const FitData& data, const FitOptions& options = {});

/// Heuristic starting values: peak and width moments for the Lorentzian,
/// limits plus a coarse grid over (N, w_env, w_decay) for the Rabi curve.
ModelSpec initial_guess(ModelId id, const FitData& data, double pulse_duration_us = 0.0);

/// Synthetic datasets for the bandwidth and Rabi-scan studies.
FitData synthetic_lorentzian(std::span<const double> x, double amplitude, double center, double fwhm,
                             double offset, double noise_fraction, std::uint64_t seed,
                             std::uint64_t stream);

struct ShotStatistics {
    int shots = 30;
    int experiments_per_shot = 3334;
    double detection_probability = 0.0216;  // detected photons per experiment at unit signal
};

/// Counts per shot are Poisson with mean experiments * p * model(w); the
/// point value is the mean over shots in units of experiments * p, sigma the
/// standard error of that mean (floored at one count).
FitData synthetic_rabi_scan(std::span<const double> omega, double t_pulse, const RabiParams& truth,
                            const ShotStatistics& stats, std::uint64_t seed, std::uint64_t stream);

}  // namespace rydpol
