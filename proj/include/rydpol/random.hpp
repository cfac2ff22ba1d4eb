#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rydpol {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A stream is fixed by (seed, stream id); consecutive draws walk the low
/// half of the counter. Streams for different trial indices are independent,
/// so trials can run in any order or in parallel with identical results.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Ten-round bijection of one counter block under `key`.
    static Block encrypt(Block counter, std::array<std::uint32_t, 2> key);

    /// Independent child stream; the parent is not advanced.
    Philox4x32 split(std::uint64_t child) const;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int used_ = 4;
};

/// Hand-written samplers so that draws are identical across standard
/// library implementations.
class Sampler {
public:
    explicit Sampler(Philox4x32 engine) : engine_(engine) {}
    Sampler(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal(double mean = 0.0, double stddev = 1.0);
    bool bernoulli(double p);
    int binomial(int trials, double p);
    int poisson(double mean);
    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

    Philox4x32& engine() { return engine_; }

private:
    Philox4x32 engine_;
};

/// Stream ids for distinct purposes within one trial.
enum class StreamPurpose : std::uint64_t {
    cloud = 1,
    write = 2,
    retrieve = 3,
    clicks = 4,
    drift = 5,
    synthetic = 6,
};

/// Stream id for (trial, purpose); purposes never collide across trials.
constexpr std::uint64_t trial_stream(std::uint64_t trial, StreamPurpose purpose) {
    return (trial << 4) | static_cast<std::uint64_t>(purpose);
}

}  // namespace rydpol
