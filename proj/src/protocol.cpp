#include "rydpol/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rydpol/parallel.hpp"

namespace rydpol {

double WriteResult::min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polariton_positions.size(); ++i)
        for (std::size_t j = i + 1; j < polariton_positions.size(); ++j)
            best = std::min(best, (polariton_positions[i] - polariton_positions[j]).norm());
    return best;
}

CloudSample sample_positions(const ExperimentConfig& config, int count, std::uint64_t seed,
                             std::uint64_t stream) {
    if (count < 1) throw std::invalid_argument("sample count must be at least 1");
    Sampler rng(seed, stream);
    CloudSample cloud;
    cloud.rng_seed = seed;
    cloud.positions.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = rng.normal(0.0, config.cloud_wr);
        const double y = rng.normal(0.0, config.cloud_wr);
        const double z = rng.normal(0.0, config.cloud_wz);
        cloud.positions.emplace_back(x, y, z);
    }
    return cloud;
}

WriteResult write_polaritons(const CloudSample& cloud, double r_o, int max_attempts, Sampler& rng) {
    if (!(r_o > 0.0)) throw std::invalid_argument("blockade radius must be positive");
    std::vector<std::size_t> order(cloud.positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates with the hand-written sampler keeps the order portable.
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto k = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[k]);
    }
    const auto attempts = std::min(order.size(), static_cast<std::size_t>(std::max(max_attempts, 0)));

    WriteResult out;
    out.candidates = static_cast<int>(attempts);
    const double r2 = r_o * r_o;
    for (std::size_t a = 0; a < attempts; ++a) {
        const Position& p = cloud.positions[order[a]];
        const bool blocked = std::any_of(out.polariton_positions.begin(), out.polariton_positions.end(),
                                         [&](const Position& q) { return (p - q).squaredNorm() < r2; });
        if (!blocked) out.polariton_positions.push_back(p);
    }
    out.n_polaritons = static_cast<int>(out.polariton_positions.size());
    return out;
}

WriteResult write_polaritons(const CloudSample& cloud, double r_o, int max_attempts, std::uint64_t seed) {
    Sampler rng(seed, 0);
    return write_polaritons(cloud, r_o, max_attempts, rng);
}

double candidate_mean(const ExperimentConfig& config) {
    return config.mean_input_photons * config.write_efficiency;
}

double polariton_overlap(std::span<const Position> positions, double c3, double omega_mu,
                         double pulse_duration, const ShotOptions& options) {
    const int sites = static_cast<int>(positions.size());
    if (sites == 0 || pulse_duration == 0.0) return 1.0;
    if (pulse_duration < 0.0) throw std::invalid_argument("pulse duration must be non-negative");
    if (sites == 1) {
        const double c = std::cos(constants::kPi * omega_mu * pulse_duration);
        return c * c;
    }
    SiteBasis basis = SiteBasis::driven(sites);
    if (options.interactions.form == ExchangeForm::full_dipole) {
        if (sites > options.max_full_basis_sites)
            throw std::length_error("too many polaritons for the four-level basis");
        basis = SiteBasis::full(sites);
    }
    const SiteHamiltonian h = build_site_hamiltonian(
        basis, std::vector<Position>(positions.begin(), positions.end()), omega_mu, c3, options.interactions);
    const StateVector psi = time_evolve(h, all_s_state(basis), pulse_duration);
    return std::clamp(retrieval_overlap(psi, basis), 0.0, 1.0);
}

ShotResult simulate_shot(const ExperimentConfig& config, const PairCoefficients& pair, double omega_mu,
                         double pulse_duration, std::uint64_t seed, std::uint64_t trial,
                         const ShotOptions& options) {
    if (pulse_duration < 0.0 || pulse_duration > config.storage_time)
        throw std::invalid_argument("microwave pulse must fit inside the storage interval");
    if (omega_mu < 0.0) throw std::invalid_argument("microwave Rabi frequency must be non-negative");

    Sampler write_rng(seed, trial_stream(trial, StreamPurpose::write));
    const int candidates = write_rng.poisson(candidate_mean(config));

    ShotResult shot;
    if (candidates > 0) {
        const CloudSample cloud =
            sample_positions(config, candidates, seed, trial_stream(trial, StreamPurpose::cloud));
        const double r_o = optical_blockade_radius(pair.c6, config.eit_width);
        const WriteResult written = write_polaritons(cloud, r_o, candidates, write_rng);
        shot.n_polaritons = written.n_polaritons;
        if (omega_mu > 0.0 && pulse_duration > 0.0)
            shot.retrieval_overlap =
                polariton_overlap(written.polariton_positions, pair.c3, omega_mu, pulse_duration, options);
    }

    Sampler out_rng(seed, trial_stream(trial, StreamPurpose::retrieve));
    if (shot.n_polaritons > 0) {
        const double survival = std::pow(shot.retrieval_overlap, 1.0 / shot.n_polaritons);
        shot.retrieved = out_rng.binomial(shot.n_polaritons, config.retrieval_efficiency * survival);
    }
    shot.detected_signal = out_rng.binomial(shot.retrieved, config.detection_efficiency);
    const double window = config.retrieval_window.end - config.retrieval_window.start;
    shot.background = out_rng.poisson(config.background_rate * window);
    return shot;
}

std::vector<ShotResult> run_shots(const ExperimentConfig& config, const PairCoefficients& pair,
                                  double omega_mu, double pulse_duration, std::uint64_t seed,
                                  std::uint64_t trials, unsigned threads, const ShotOptions& options) {
    std::vector<ShotResult> out(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        out[i] = simulate_shot(config, pair, omega_mu, pulse_duration, seed, i, options);
    });
    return out;
}

namespace {

template <typename Get>
MeanEstimate estimate(const std::vector<ShotResult>& shots, Get get) {
    MeanEstimate e;
    if (shots.empty()) return e;
    const double n = static_cast<double>(shots.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (const auto& s : shots) {
        const double v = get(s);
        sum += v;
        sum2 += v * v;
    }
    e.mean = sum / n;
    if (shots.size() > 1) {
        const double var = std::max(0.0, (sum2 - n * e.mean * e.mean) / (n - 1.0));
        e.error = std::sqrt(var / n);
    }
    return e;
}

}  // namespace

MeanEstimate mean_retrieved(const std::vector<ShotResult>& shots) {
    return estimate(shots, [](const ShotResult& s) { return static_cast<double>(s.retrieved); });
}

MeanEstimate mean_detected(const std::vector<ShotResult>& shots) {
    return estimate(shots, [](const ShotResult& s) { return static_cast<double>(s.detected()); });
}

}  // namespace rydpol
