#include "rydpol/photon_stats.hpp"

#include <algorithm>
#include <cmath>

#include "rydpol/parallel.hpp"
#include "rydpol/random.hpp"

namespace rydpol {

namespace {

constexpr double kTwoPi = 2.0 * constants::kPi;

void sort_events(std::vector<ClickEvent>& events) {
    std::sort(events.begin(), events.end(), [](const ClickEvent& a, const ClickEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.detector < b.detector;
    });
}

}  // namespace

ClickRecord generate_click_stream(const ExperimentConfig& config, std::span<const int> counts,
                                  std::uint64_t seed) {
    const RetrievalWindow w = config.retrieval_window;
    if (!(w.end > w.start) || w.start < 0.0 || w.end > config.repetition_period)
        throw std::invalid_argument("retrieval window must lie inside the repetition period");
    for (int c : counts)
        if (c < 0) throw std::invalid_argument("photon counts must be non-negative");

    ClickRecord rec;
    rec.n_trials = counts.size();
    rec.window = w;
    rec.period = config.repetition_period;

    const double centre = 0.5 * (w.start + w.end);
    const double sigma = kRetrievedPulseFwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double background_mean = config.background_rate * (w.end - w.start);

    for (std::size_t p = 0; p < counts.size(); ++p) {
        Sampler rng(seed, trial_stream(p, StreamPurpose::clicks));
        const double t0 = static_cast<double>(p) * rec.period;
        for (int i = 0; i < counts[p]; ++i) {
            double t;
            do {
                t = rng.normal(centre, sigma);
            } while (t < w.start || t >= w.end);
            const Detector d = rng.bernoulli(0.5) ? Detector::B : Detector::A;
            rec.events.push_back({t0 + t, d, p, true});
        }
        const int n_bg = background_mean > 0.0 ? rng.poisson(background_mean) : 0;
        for (int i = 0; i < n_bg; ++i) {
            const double t = w.start + (w.end - w.start) * rng.uniform();
            const Detector d = rng.bernoulli(0.5) ? Detector::B : Detector::A;
            rec.events.push_back({t0 + t, d, p, false});
        }
    }
    sort_events(rec.events);
    return rec;
}

G2Result hbt_g2(const ClickRecord& clicks, const G2Options& options, unsigned threads) {
    if (clicks.events.size() < 2) throw G2Error("at least two clicks are needed");
    if (options.max_lag < options.norm_max || options.norm_min < 1 || options.norm_min > options.norm_max)
        throw std::invalid_argument("normalization range must satisfy 1 <= norm_min <= norm_max <= max_lag");
    const std::uint64_t n = clicks.n_trials;
    if (n <= static_cast<std::uint64_t>(options.norm_max))
        throw G2Error("record is shorter than the normalization range");

    std::vector<double> na(n, 0.0), nb(n, 0.0);
    double singles_a = 0.0;
    double singles_b = 0.0;
    for (const auto& e : clicks.events) {
        if (e.trial >= n) throw std::invalid_argument("click trial index outside the record");
        if (e.detector == Detector::A) {
            na[e.trial] += 1.0;
            singles_a += 1.0;
        } else {
            nb[e.trial] += 1.0;
            singles_b += 1.0;
        }
    }

    const int k_max = options.max_lag;
    const std::size_t bins = static_cast<std::size_t>(2 * k_max + 1);
    G2Result out;
    out.lags.resize(bins);
    out.tau_bins.resize(bins);
    out.coincidences.assign(bins, 0.0);
    std::vector<double> pairs(bins, 0.0);

    parallel_for(bins, threads, [&](std::size_t b) {
        const long k = static_cast<long>(b) - k_max;
        const auto shift = static_cast<std::uint64_t>(std::labs(k));
        double acc = 0.0;
        for (std::uint64_t p = 0; p + shift < n; ++p)
            acc += k >= 0 ? na[p] * nb[p + shift] : na[p + shift] * nb[p];
        out.coincidences[b] = acc;
        pairs[b] = static_cast<double>(n - shift);
    });

    double side_rate = 0.0;
    double side_counts = 0.0;
    int side_bins = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const int k = static_cast<int>(b) - k_max;
        out.lags[b] = k;
        out.tau_bins[b] = k * clicks.period;
        if (std::abs(k) >= options.norm_min && std::abs(k) <= options.norm_max) {
            side_rate += out.coincidences[b] / pairs[b];
            side_counts += out.coincidences[b];
            ++side_bins;
        }
    }
    if (side_counts <= 0.0) throw G2Error("no coincidences in the normalization range");
    side_rate /= side_bins;

    out.g2.resize(bins);
    out.error.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double rate = out.coincidences[b] / pairs[b];
        out.g2[b] = rate / side_rate;
        const double c = out.coincidences[b];
        // Poisson error on C_k combined with that of the normalization; an
        // empty bin gets the one-count scale.
        out.error[b] = c > 0.0 ? out.g2[b] * std::sqrt(1.0 / c + 1.0 / side_counts)
                               : 1.0 / (pairs[b] * side_rate);
    }
    const auto zero = static_cast<std::size_t>(k_max);
    out.g2_zero = out.g2[zero];
    out.g2_zero_err = out.error[zero];

    const double nd = static_cast<double>(n);
    const double accidental = (singles_a / nd) * (singles_b / nd);
    out.side_peak_level = side_rate / accidental;
    out.side_peak_err = out.side_peak_level / std::sqrt(side_counts);
    return out;
}

double background_correct_g2(double g2_measured, double signal_fraction) {
    if (!(signal_fraction > 0.0 && signal_fraction <= 1.0))
        throw std::domain_error("signal fraction must lie in (0, 1]");
    if (!std::isfinite(g2_measured) || g2_measured < 0.0)
        throw std::domain_error("measured g2 must be finite and non-negative");
    const double r2 = signal_fraction * signal_fraction;
    return std::max(0.0, (g2_measured - (1.0 - r2)) / r2);
}

double drift_relative_std(const DriftSpec& spec) {
    return spec.shape == DriftShape::sinusoidal ? spec.amplitude / std::sqrt(2.0)
                                                : spec.amplitude / std::sqrt(3.0);
}

double drift_amplitude_for(DriftShape shape, double relative_std) {
    return shape == DriftShape::sinusoidal ? relative_std * std::sqrt(2.0) : relative_std * std::sqrt(3.0);
}

double drift_modulation(const DriftSpec& spec, std::uint64_t trial) {
    const double x = static_cast<double>(trial) / spec.period_trials;
    if (spec.shape == DriftShape::sinusoidal) return 1.0 + spec.amplitude * std::sin(kTwoPi * x + spec.phase);
    const double frac = x + spec.phase / kTwoPi - std::floor(x + spec.phase / kTwoPi);
    return 1.0 - spec.amplitude + 2.0 * spec.amplitude * frac;
}

ClickRecord efficiency_drift_model(const ClickRecord& clicks, const DriftSpec& spec) {
    if (!(spec.amplitude >= 0.0 && spec.amplitude < 1.0))
        throw std::invalid_argument("drift amplitude must lie in [0, 1)");
    if (!(spec.period_trials > 0.0)) throw std::invalid_argument("drift period must be positive");
    ClickRecord out = clicks;
    out.events.clear();
    out.events.reserve(clicks.events.size());
    // One stream per trial keeps the thinning independent of event order.
    std::uint64_t current = ~std::uint64_t{0};
    Sampler rng(spec.seed, 0);
    for (const auto& e : clicks.events) {
        if (!e.signal) {
            out.events.push_back(e);
            continue;
        }
        if (e.trial != current) {
            current = e.trial;
            rng = Sampler(spec.seed, trial_stream(e.trial, StreamPurpose::drift));
        }
        const double keep = drift_modulation(spec, e.trial) / (1.0 + spec.amplitude);
        if (rng.uniform() < keep) out.events.push_back(e);
    }
    return out;
}

}  // namespace rydpol
