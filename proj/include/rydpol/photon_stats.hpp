#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rydpol/units.hpp"

namespace rydpol {

enum class Detector : std::uint8_t { A = 0, B = 1 };

/// One detector click. `time` is absolute (trial * period + offset), in us.
struct ClickEvent {
    double time = 0.0;
    Detector detector = Detector::A;
    std::uint64_t trial = 0;
    bool signal = true;  // false for background clicks
};

struct ClickRecord {
    std::vector<ClickEvent> events;  // sorted by time
    std::uint64_t n_trials = 0;
    RetrievalWindow window;
    double period = 6.0;  // us
};

/// FWHM of the retrieved pulse envelope, us.
inline constexpr double kRetrievedPulseFwhm = 0.120;

/// Places counts[p] signal photons in trial p with a Gaussian envelope centred
/// in the retrieval window (truncated to it), routes each to A or B with equal
/// probability, and adds uniform Poisson background at the configured rate.
ClickRecord generate_click_stream(const ExperimentConfig& config, std::span<const int> counts,
                                  std::uint64_t seed);

struct G2Options {
    int max_lag = 50;
    int norm_min = 5;   // normalization uses |k| in [norm_min, norm_max]
    int norm_max = 50;
};

struct G2Result {
    std::vector<int> lags;             // pulse-index difference k
    std::vector<double> tau_bins;      // k * period, us
    std::vector<double> coincidences;  // raw C_k
    std::vector<double> g2;
    std::vector<double> error;
    double g2_zero = 0.0;
    double g2_zero_err = 0.0;
    /// Mean side peak in units of the accidental rate from the singles,
    /// N_A N_B / n_trials^2 per pulse pair. Equals 1 for a stationary source.
    double side_peak_level = 0.0;
    double side_peak_err = 0.0;
};

class G2Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cross-detector coincidences C_k = sum_p nA(p) nB(p + k), each lag divided
/// by its number of pulse pairs and normalized by the mean over the side
/// peaks with norm_min <= |k| <= norm_max.
G2Result hbt_g2(const ClickRecord& clicks, const G2Options& options = {}, unsigned threads = 1);

/// (g2 - (1 - rho^2)) / rho^2 clipped at 0, for an uncorrelated Poissonian
/// background making up a fraction 1 - rho of the counts.
double background_correct_g2(double g2_measured, double signal_fraction);

enum class DriftShape { sinusoidal, linear };

/// Slow modulation m(p) of the per-trial retrieval probability,
/// m in [1 - a, 1 + a]. Linear drift is a sawtooth over each period.
struct DriftSpec {
    DriftShape shape = DriftShape::sinusoidal;
    double amplitude = 0.0;
    double period_trials = 3334.0;
    double phase = 0.0;  // rad
    std::uint64_t seed = 0;
};

/// Relative standard deviation of m(p) over a full period.
double drift_relative_std(const DriftSpec& spec);
/// Amplitude giving the requested relative standard deviation.
double drift_amplitude_for(DriftShape shape, double relative_std);
double drift_modulation(const DriftSpec& spec, std::uint64_t trial);

/// Thins signal clicks so that trial p keeps each with probability
/// m(p) / (1 + a). Background clicks are untouched.
ClickRecord efficiency_drift_model(const ClickRecord& clicks, const DriftSpec& spec);

}  // namespace rydpol
