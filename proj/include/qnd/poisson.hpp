#pragma once

#include <cstdint>
#include <random>

namespace qnd {

/// Engine used by every sampler in the library.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for chunk `chunk` of stage `stage`: mix64 chained over
/// (seed, stage, chunk). Fixed so results are reproducible on any machine.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t chunk);

/// Poisson variates with a method fixed by the mean:
///  - mean < 10: inversion by sequential search from k = 0;
///  - mean >= 10: Hoermann's PTRS transformed rejection (1993).
class PoissonSampler {
  public:
    static constexpr double inversion_limit = 10.0;
    static constexpr double max_mean = 1e12;

    explicit PoissonSampler(double mean);

    double mean() const { return mean_; }
    std::uint64_t operator()(Engine& engine) const;

  private:
    std::uint64_t sample_inversion(Engine& engine) const;
    std::uint64_t sample_ptrs(Engine& engine) const;

    double mean_;
    double exp_neg_mean_ = 0.0;
    // PTRS constants
    double sqrt_mean_ = 0.0;
    double log_mean_ = 0.0;
    double b_ = 0.0;
    double a_ = 0.0;
    double inv_alpha_ = 0.0;
    double v_r_ = 0.0;
};

} // namespace qnd
