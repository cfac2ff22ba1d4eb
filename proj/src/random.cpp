#include "rydpol/random.hpp"

#include <cmath>
#include <stdexcept>

namespace rydpol {

namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53u;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// SplitMix64 finalizer, used to spread child stream ids.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block c, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMultiplier0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMultiplier1} * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return c;
}

Philox4x32::result_type Philox4x32::operator()() {
    if (used_ >= 4) {
        buffer_ = encrypt({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          key_);
        ++block_;
        used_ = 0;
    }
    const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_)];
    const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_) + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

Philox4x32 Philox4x32::split(std::uint64_t child) const {
    const std::uint64_t seed = (std::uint64_t{key_[1]} << 32) | key_[0];
    return Philox4x32(mix64(seed ^ mix64(stream_)), child);
}

double Sampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Sampler::normal(double mean, double stddev) {
    // Box-Muller; one draw per call keeps the stream position predictable.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

bool Sampler::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
}

int Sampler::binomial(int trials, double p) {
    if (trials < 0) throw std::domain_error("binomial trial count must be non-negative");
    int k = 0;
    for (int i = 0; i < trials; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
}

int Sampler::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::domain_error("Poisson mean must be non-negative");
    if (mean == 0.0) return 0;
    // Split large means into pieces small enough for Knuth's product method.
    int total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double piece = remaining > 20.0 ? 20.0 : remaining;
        remaining -= piece;
        const double limit = std::exp(-piece);
        double product = uniform();
        while (product > limit) {
            ++total;
            product *= uniform();
        }
    }
    return total;
}

std::uint64_t Sampler::below(std::uint64_t n) {
    if (n == 0) throw std::domain_error("empty range");
    // Rejection keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

}  // namespace rydpol
