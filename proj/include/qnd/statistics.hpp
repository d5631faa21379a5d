#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qnd {

using Complex = std::complex<double>;

/// Raised when an ensemble, weight set or profile violates its invariants.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One kind of complex: how many members it places in each tube, and the
/// expected number of such complexes inside the illuminated region. Counts
/// are Poissonian and independent of every other species.
struct Species {
    std::string name;
    Eigen::VectorXi composition;
    double mean_count = 0.0;
};

/// Independent Poissonian species spread over `tube_count` tubes.
class Ensemble {
  public:
    explicit Ensemble(Eigen::Index tube_count, std::vector<Species> species = {});

    Eigen::Index tube_count() const { return tube_count_; }
    const std::vector<Species>& species() const { return species_; }
    Eigen::Index species_count() const { return static_cast<Eigen::Index>(species_.size()); }

    /// S x T matrix of member counts, row s = composition of species s.
    Eigen::MatrixXd composition_matrix() const;
    /// Mean counts lambda_s as a vector.
    Eigen::VectorXd mean_counts() const;

    /// Copy with every mean count multiplied by `factor` (>= 0).
    Ensemble scaled(double factor) const;

  private:
    Eigen::Index tube_count_;
    std::vector<Species> species_;
};

/// Species lists of both ensembles concatenated (tube counts must match).
Ensemble merge(const Ensemble& a, const Ensemble& b);

/// mu_i = sum_s c_si lambda_s.
Eigen::VectorXd tube_means(const Ensemble& ensemble);

/// Full covariance of the tube counts, C^T diag(lambda) C.
Eigen::MatrixXd number_covariance(const Ensemble& ensemble);

/// Cov(N_i, N_j) = sum_s c_si c_sj lambda_s.
double number_covariance(const Ensemble& ensemble, Eigen::Index i, Eigen::Index j);

/// Transverse laser profile R(x) with peak value 1, centered on a tube
/// segment [0, L].
///
/// TopHat: R = 1 on |x - L/2| <= W/2, 0 elsewhere.
/// Gaussian: R = exp(-(2 (x - L/2) / W)^2), so that over an infinite tube
/// int R = W sqrt(pi) / 2 and int R^2 = int R / sqrt(2); on [0, L] both are
/// truncated by the corresponding erf factor.
class BeamProfile {
  public:
    enum class Shape { TopHat, Gaussian };

    BeamProfile(Shape shape, double width, double tube_length);

    static BeamProfile top_hat(double width, double tube_length) { return {Shape::TopHat, width, tube_length}; }
    static BeamProfile gaussian(double width, double tube_length) { return {Shape::Gaussian, width, tube_length}; }

    Shape shape() const { return shape_; }
    double width() const { return width_; }
    double tube_length() const { return tube_length_; }

    /// R(x) for x in [0, L].
    double value(double x) const;
    /// int_0^L R dx.
    double integral() const;
    /// int_0^L R^2 dx.
    double square_integral() const;

  private:
    Shape shape_;
    double width_;
    double tube_length_;
};

std::string to_string(BeamProfile::Shape shape);
BeamProfile::Shape beam_shape_from_string(const std::string& name);

/// Moments of the profile-weighted count of a Poisson point process of
/// density `density` (complexes per unit length); Campbell's theorem.
struct NumberMoments {
    double mean = 0.0;
    double variance = 0.0;
};

NumberMoments effective_number_moments(double density, const BeamProfile& profile);

/// Amplitude and photon number in units of C and |C|^2.
struct IntensityReport {
    Complex amplitude_mean{0.0, 0.0};
    double photon_rate = 0.0;
    double coherent_part = 0.0;
    double fluctuation_part = 0.0;
};

/// w_s = sum_i g_i c_si: the amplitude one complex of species s scatters.
Eigen::VectorXcd species_weights(const Ensemble& ensemble, const Eigen::VectorXcd& weights);

/// Closed-form <a>/C and <a^dagger a>/|C|^2 for amplitude D = sum_i g_i N_i:
/// |sum_i g_i mu_i|^2 + sum_s lambda_s |w_s|^2.
IntensityReport intensity(const Ensemble& ensemble, const Eigen::VectorXcd& weights);

/// As above with counts weighted by a beam profile: the fluctuation part of
/// every species is scaled by int R^2 / int R (1 for a top hat).
IntensityReport intensity(const Ensemble& ensemble, const Eigen::VectorXcd& weights, const BeamProfile& profile);

template <typename Derived>
IntensityReport intensity(const Ensemble& ensemble, const Eigen::MatrixBase<Derived>& weights)
{
    return intensity(ensemble, Eigen::VectorXcd(weights.template cast<Complex>()));
}

/// alpha = mu_A / mu_B for a two-tube ensemble.
double population_ratio(const Ensemble& ensemble);

/// (1, -alpha): weights that cancel the mean amplitude of this ensemble.
Eigen::VectorXcd minimum_weights(const Ensemble& ensemble);

} // namespace qnd
