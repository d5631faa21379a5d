#include "qnd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qnd/poisson.hpp"

namespace qnd {

namespace {

// Running moments of |D|^2 (real) and D (complex) for one chunk.
struct Moments {
    std::uint64_t n = 0;
    double rate_mean = 0.0;
    double rate_m2 = 0.0;
    Complex amp_mean{0.0, 0.0};
    double amp_m2 = 0.0;

    void push(Complex d)
    {
        ++n;
        const double inv_n = 1.0 / static_cast<double>(n);
        const double r = std::norm(d);
        const double dr = r - rate_mean;
        rate_mean += dr * inv_n;
        rate_m2 += dr * (r - rate_mean);

        const Complex da = d - amp_mean;
        amp_mean += da * inv_n;
        amp_m2 += std::real(da * std::conj(d - amp_mean));
    }

    // Chan et al. pairwise combination.
    void merge(const Moments& other)
    {
        if (other.n == 0)
            return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(other.n);
        const double nt = na + nb;

        const double dr = other.rate_mean - rate_mean;
        rate_mean += dr * (nb / nt);
        rate_m2 += other.rate_m2 + dr * dr * (na * nb / nt);

        const Complex da = other.amp_mean - amp_mean;
        amp_mean += da * (nb / nt);
        amp_m2 += other.amp_m2 + std::norm(da) * (na * nb / nt);

        n += other.n;
    }
};

struct SpeciesDraw {
    Complex weight;
    PoissonSampler count;
};

class ChunkSampler {
  public:
    ChunkSampler(const Ensemble& ensemble, const Eigen::VectorXcd& weights, const McConfig& config)
        : profile_(config.profile)
    {
        const Eigen::VectorXcd w = species_weights(ensemble, weights);
        const Eigen::VectorXd lambda = ensemble.mean_counts();
        for (Eigen::Index s = 0; s < w.size(); ++s) {
            if (lambda(s) > PoissonSampler::max_mean)
                throw std::overflow_error("species '" + ensemble.species()[static_cast<std::size_t>(s)].name +
                                          "': mean count above 1e12 is refused");
            if (config.position_resolved) {
                // Count over the whole tube; R(x) is applied per complex.
                const double density = lambda(s) / profile_->integral();
                species_.push_back({w(s), PoissonSampler(density * profile_->tube_length())});
            } else {
                species_.push_back({w(s), PoissonSampler(lambda(s))});
            }
        }
    }

    Moments run(std::uint64_t chunk_seed, std::uint64_t n) const
    {
        Engine engine(chunk_seed);
        Moments m;
        for (std::uint64_t i = 0; i < n; ++i) {
            Complex d{0.0, 0.0};
            for (const SpeciesDraw& s : species_) {
                const std::uint64_t count = s.count(engine);
                if (!profile_) {
                    d += s.weight * static_cast<double>(count);
                    continue;
                }
                double weighted = 0.0;
                for (std::uint64_t c = 0; c < count; ++c)
                    weighted += profile_->value(profile_->tube_length() * uniform01(engine));
                d += s.weight * weighted;
            }
            m.push(d);
        }
        return m;
    }

  private:
    std::optional<BeamProfile> profile_;
    std::vector<SpeciesDraw> species_;
};

void validate(const McConfig& config)
{
    if (config.samples < 1)
        throw ValidationError("Monte Carlo needs at least one sample");
    if (config.position_resolved && !config.profile)
        throw ValidationError("position-resolved Monte Carlo needs a beam profile");
}

McEstimate estimate_stage(const Ensemble& ensemble,
                          const Eigen::VectorXcd& weights,
                          const McConfig& config,
                          std::uint64_t stage)
{
    validate(config);
    McConfig local = config;
    if (!local.position_resolved)
        local.profile.reset();
    const ChunkSampler sampler(ensemble, weights, local);

    const std::uint64_t chunk_count = (config.samples + mc_chunk_size - 1) / mc_chunk_size;
    std::vector<Moments> chunks(chunk_count);

    auto work = [&](std::uint64_t c) {
        const std::uint64_t begin = c * mc_chunk_size;
        const std::uint64_t n = std::min(mc_chunk_size, config.samples - begin);
        chunks[c] = sampler.run(derive_seed(config.seed, stage, c), n);
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunk_count));
    if (threads <= 1) {
        for (std::uint64_t c = 0; c < chunk_count; ++c)
            work(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t c = next++; c < chunk_count; c = next++)
                    work(c);
            });
    }

    Moments total;
    for (const Moments& m : chunks)
        total.merge(m);

    const double n = static_cast<double>(total.n);
    McEstimate out;
    out.samples_used = total.n;
    out.photon_rate_mean = total.rate_mean;
    out.amplitude_mean = total.amp_mean;
    if (total.n > 1) {
        out.photon_rate_stderr = std::sqrt(total.rate_m2 / (n - 1.0) / n);
        out.amplitude_stderr = std::sqrt(total.amp_m2 / (n - 1.0) / n);
    }
    return out;
}

} // namespace

McEstimate estimate(const Ensemble& ensemble, const Eigen::VectorXcd& weights, const McConfig& config)
{
    return estimate_stage(ensemble, weights, config, 0);
}

std::vector<McEstimate> estimate_scan(std::span<const Ensemble> stages,
                                      const Eigen::VectorXcd& weights,
                                      const McConfig& config)
{
    std::vector<McEstimate> out;
    out.reserve(stages.size());
    for (std::size_t k = 0; k < stages.size(); ++k)
        out.push_back(estimate_stage(stages[k], weights, config, k));
    return out;
}

} // namespace qnd
