#pragma once

#include <cstdint>
#include <vector>

#include "rydpol/interactions.hpp"
#include "rydpol/random.hpp"
#include "rydpol/units.hpp"

namespace rydpol {

/// Atom positions drawn from the anisotropic Gaussian density (w_r, w_r, w_z).
struct CloudSample {
    std::vector<Position> positions;
    std::uint64_t rng_seed = 0;
};

/// Excitations that survived the hard-sphere blockade during the write.
struct WriteResult {
    std::vector<Position> polariton_positions;
    int n_polaritons = 0;
    int candidates = 0;

    double min_pairwise_distance() const;
};

CloudSample sample_positions(const ExperimentConfig& config, int count, std::uint64_t seed,
                             std::uint64_t stream = 0);

/// Sequential random-order acceptance: candidates are visited in a random
/// order (at most `max_attempts` of them) and a candidate is excited iff no
/// earlier excitation lies closer than r_o.
WriteResult write_polaritons(const CloudSample& cloud, double r_o, int max_attempts, Sampler& rng);
WriteResult write_polaritons(const CloudSample& cloud, double r_o, int max_attempts, std::uint64_t seed);

struct ShotOptions {
    InteractionOptions interactions;
    /// Largest polariton number simulated in the full four-level basis when
    /// the exchange form needs it; the rotating-wave form always uses the
    /// driven {s, p0} subspace, which it leaves invariant.
    int max_full_basis_sites = 4;
};

struct ShotResult {
    int n_polaritons = 0;
    double retrieval_overlap = 1.0;  // |<all s|psi(t)>|^2
    int retrieved = 0;               // photons leaving the medium
    int detected_signal = 0;
    int background = 0;
    int detected() const { return detected_signal + background; }
};

/// Poisson mean of candidate excitations before blockade.
double candidate_mean(const ExperimentConfig& config);

/// One store / rotate / retrieve experiment. Trial `trial` of master seed
/// `seed` always produces the same result.
ShotResult simulate_shot(const ExperimentConfig& config, const PairCoefficients& pair, double omega_mu,
                         double pulse_duration, std::uint64_t seed, std::uint64_t trial,
                         const ShotOptions& options = {});

/// Runs trials [0, trials) and returns results in trial order.
std::vector<ShotResult> run_shots(const ExperimentConfig& config, const PairCoefficients& pair,
                                  double omega_mu, double pulse_duration, std::uint64_t seed,
                                  std::uint64_t trials, unsigned threads = 1,
                                  const ShotOptions& options = {});

/// Collective retrieval overlap after a pulse of duration t for polaritons
/// at `positions`.
double polariton_overlap(std::span<const Position> positions, double c3, double omega_mu,
                         double pulse_duration, const ShotOptions& options = {});

/// Mean and standard error of a per-trial quantity.
struct MeanEstimate {
    double mean = 0.0;
    double error = 0.0;
};
MeanEstimate mean_retrieved(const std::vector<ShotResult>& shots);
MeanEstimate mean_detected(const std::vector<ShotResult>& shots);

}  // namespace rydpol
