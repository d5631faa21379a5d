#include "qnd/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace qnd {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t chunk)
{
    return mix64(mix64(mix64(seed) ^ stage) ^ chunk);
}

PoissonSampler::PoissonSampler(double mean) : mean_(mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("Poisson mean must be finite and >= 0");
    if (mean > max_mean)
        throw std::overflow_error("Poisson mean above 1e12 is refused");

    if (mean < inversion_limit) {
        exp_neg_mean_ = std::exp(-mean);
    } else {
        sqrt_mean_ = std::sqrt(mean);
        log_mean_ = std::log(mean);
        b_ = 0.931 + 2.53 * sqrt_mean_;
        a_ = -0.059 + 0.02483 * b_;
        inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
        v_r_ = 0.9277 - 3.6224 / (b_ - 2.0);
    }
}

std::uint64_t PoissonSampler::operator()(Engine& engine) const
{
    if (mean_ == 0.0)
        return 0;
    return mean_ < inversion_limit ? sample_inversion(engine) : sample_ptrs(engine);
}

std::uint64_t PoissonSampler::sample_inversion(Engine& engine) const
{
    double u = uniform01(engine);
    std::uint64_t k = 0;
    double p = exp_neg_mean_;
    double cdf = p;
    // Tail mass below ~1e-16 is folded into the last reachable k.
    while (u > cdf) {
        ++k;
        p *= mean_ / static_cast<double>(k);
        if (p == 0.0)
            break;
        cdf += p;
    }
    return k;
}

std::uint64_t PoissonSampler::sample_ptrs(Engine& engine) const
{
    for (;;) {
        const double u = uniform01(engine) - 0.5;
        const double v = uniform01(engine);
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a_ / us + b_) * u + mean_ + 0.43);

        if (us >= 0.07 && v <= v_r_)
            return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        const double lhs = std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_);
        const double rhs = -mean_ + k * log_mean_ - std::lgamma(k + 1.0);
        if (lhs <= rhs)
            return static_cast<std::uint64_t>(k);
    }
}

} // namespace qnd
