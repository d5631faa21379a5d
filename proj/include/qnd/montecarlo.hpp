#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qnd/statistics.hpp"

namespace qnd {

struct McConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    /// Sample complex positions along the tube and weight each by R(x).
    bool position_resolved = false;
    /// Required iff position_resolved.
    std::optional<BeamProfile> profile;
    /// Worker threads; 0 picks std::thread::hardware_concurrency(). Does
    /// not affect results.
    unsigned threads = 0;
};

/// Sample means of |D|^2 and D with standard errors, D = sum_i g_i N_i.
///
/// photon_rate_stderr comes from the sample variance of |D|^2 itself (no
/// Gaussian assumption on D); amplitude_stderr from E|D - <D>|^2.
struct McEstimate {
    double photon_rate_mean = 0.0;
    double photon_rate_stderr = 0.0;
    Complex amplitude_mean{0.0, 0.0};
    double amplitude_stderr = 0.0;
    std::uint64_t samples_used = 0;
};

/// Samples per chunk. Chunk c of stage k draws from an engine seeded with
/// derive_seed(seed, k, c); chunk statistics are merged in chunk order.
inline constexpr std::uint64_t mc_chunk_size = 1u << 16;

McEstimate estimate(const Ensemble& ensemble, const Eigen::VectorXcd& weights, const McConfig& config);

template <typename Derived>
McEstimate estimate(const Ensemble& ensemble, const Eigen::MatrixBase<Derived>& weights, const McConfig& config)
{
    return estimate(ensemble, Eigen::VectorXcd(weights.template cast<Complex>()), config);
}

/// estimate() for every stage, stage k using sub-seed index k.
std::vector<McEstimate> estimate_scan(std::span<const Ensemble> stages,
                                      const Eigen::VectorXcd& weights,
                                      const McConfig& config);

} // namespace qnd
