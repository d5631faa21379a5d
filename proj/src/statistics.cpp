#include "qnd/statistics.hpp"

#include <cmath>
#include <numbers>

namespace qnd {

Ensemble::Ensemble(Eigen::Index tube_count, std::vector<Species> species)
    : tube_count_(tube_count), species_(std::move(species))
{
    if (tube_count_ < 1)
        throw ValidationError("ensemble needs at least one tube");
    for (const Species& s : species_) {
        if (s.composition.size() != tube_count_)
            throw ValidationError("species '" + s.name + "': composition has " +
                                  std::to_string(s.composition.size()) + " entries, expected " +
                                  std::to_string(tube_count_));
        if ((s.composition.array() < 0).any())
            throw ValidationError("species '" + s.name + "': negative member count");
        if ((s.composition.array() == 0).all())
            throw ValidationError("species '" + s.name + "': composition is all zero");
        if (!(s.mean_count >= 0.0) || !std::isfinite(s.mean_count))
            throw ValidationError("species '" + s.name + "': mean count must be finite and >= 0");
    }
}

Eigen::MatrixXd Ensemble::composition_matrix() const
{
    Eigen::MatrixXd c(species_count(), tube_count_);
    for (Eigen::Index s = 0; s < species_count(); ++s)
        c.row(s) = species_[static_cast<std::size_t>(s)].composition.cast<double>().transpose();
    return c;
}

Eigen::VectorXd Ensemble::mean_counts() const
{
    Eigen::VectorXd lambda(species_count());
    for (Eigen::Index s = 0; s < species_count(); ++s)
        lambda(s) = species_[static_cast<std::size_t>(s)].mean_count;
    return lambda;
}

Ensemble Ensemble::scaled(double factor) const
{
    if (!(factor >= 0.0))
        throw ValidationError("scale factor must be >= 0");
    std::vector<Species> out = species_;
    for (Species& s : out)
        s.mean_count *= factor;
    return Ensemble(tube_count_, std::move(out));
}

Ensemble merge(const Ensemble& a, const Ensemble& b)
{
    if (a.tube_count() != b.tube_count())
        throw ValidationError("cannot merge ensembles with different tube counts");
    std::vector<Species> species = a.species();
    species.insert(species.end(), b.species().begin(), b.species().end());
    return Ensemble(a.tube_count(), std::move(species));
}

Eigen::VectorXd tube_means(const Ensemble& ensemble)
{
    if (ensemble.species_count() == 0)
        return Eigen::VectorXd::Zero(ensemble.tube_count());
    return ensemble.composition_matrix().transpose() * ensemble.mean_counts();
}

Eigen::MatrixXd number_covariance(const Ensemble& ensemble)
{
    const Eigen::MatrixXd c = ensemble.composition_matrix();
    return c.transpose() * ensemble.mean_counts().asDiagonal() * c;
}

double number_covariance(const Ensemble& ensemble, Eigen::Index i, Eigen::Index j)
{
    if (i < 0 || j < 0 || i >= ensemble.tube_count() || j >= ensemble.tube_count())
        throw std::out_of_range("tube index out of range");
    double cov = 0.0;
    for (const Species& s : ensemble.species())
        cov += static_cast<double>(s.composition(i)) * s.composition(j) * s.mean_count;
    return cov;
}

BeamProfile::BeamProfile(Shape shape, double width, double tube_length)
    : shape_(shape), width_(width), tube_length_(tube_length)
{
    if (!(width > 0.0) || !std::isfinite(width))
        throw ValidationError("beam width must be positive");
    if (!(tube_length >= width) || !std::isfinite(tube_length))
        throw ValidationError("tube length must be finite and at least the beam width");
}

double BeamProfile::value(double x) const
{
    const double offset = x - 0.5 * tube_length_;
    if (shape_ == Shape::TopHat)
        return std::abs(offset) <= 0.5 * width_ ? 1.0 : 0.0;
    const double u = 2.0 * offset / width_;
    return std::exp(-u * u);
}

double BeamProfile::integral() const
{
    if (shape_ == Shape::TopHat)
        return width_;
    return 0.5 * width_ * std::sqrt(std::numbers::pi) * std::erf(tube_length_ / width_);
}

double BeamProfile::square_integral() const
{
    if (shape_ == Shape::TopHat)
        return width_;
    return 0.5 * width_ * std::sqrt(0.5 * std::numbers::pi) * std::erf(std::numbers::sqrt2 * tube_length_ / width_);
}

std::string to_string(BeamProfile::Shape shape)
{
    return shape == BeamProfile::Shape::TopHat ? "tophat" : "gaussian";
}

BeamProfile::Shape beam_shape_from_string(const std::string& name)
{
    if (name == "tophat" || name == "TopHat")
        return BeamProfile::Shape::TopHat;
    if (name == "gaussian" || name == "Gaussian")
        return BeamProfile::Shape::Gaussian;
    throw std::invalid_argument("unknown beam shape '" + name + "' (expected 'tophat' or 'gaussian')");
}

NumberMoments effective_number_moments(double density, const BeamProfile& profile)
{
    if (!(density >= 0.0))
        throw ValidationError("density must be >= 0");
    return {density * profile.integral(), density * profile.square_integral()};
}

Eigen::VectorXcd species_weights(const Ensemble& ensemble, const Eigen::VectorXcd& weights)
{
    if (weights.size() != ensemble.tube_count())
        throw ValidationError("weight count " + std::to_string(weights.size()) +
                              " does not match tube count " + std::to_string(ensemble.tube_count()));
    if (ensemble.species_count() == 0)
        return Eigen::VectorXcd::Zero(0);
    return ensemble.composition_matrix().cast<Complex>() * weights;
}

namespace {

IntensityReport intensity_scaled(const Ensemble& ensemble, const Eigen::VectorXcd& weights, double fluctuation_scale)
{
    const Eigen::VectorXcd w = species_weights(ensemble, weights);
    const Eigen::VectorXd lambda = ensemble.mean_counts();

    IntensityReport report;
    for (Eigen::Index s = 0; s < w.size(); ++s) {
        report.amplitude_mean += lambda(s) * w(s);
        report.fluctuation_part += lambda(s) * std::norm(w(s));
    }
    report.fluctuation_part *= fluctuation_scale;
    report.coherent_part = std::norm(report.amplitude_mean);
    report.photon_rate = report.coherent_part + report.fluctuation_part;
    return report;
}

} // namespace

IntensityReport intensity(const Ensemble& ensemble, const Eigen::VectorXcd& weights)
{
    return intensity_scaled(ensemble, weights, 1.0);
}

IntensityReport intensity(const Ensemble& ensemble, const Eigen::VectorXcd& weights, const BeamProfile& profile)
{
    return intensity_scaled(ensemble, weights, profile.square_integral() / profile.integral());
}

double population_ratio(const Ensemble& ensemble)
{
    if (ensemble.tube_count() != 2)
        throw ValidationError("population ratio is defined for two-tube ensembles");
    const Eigen::VectorXd mu = tube_means(ensemble);
    if (!(mu(1) > 0.0))
        throw ValidationError("population ratio undefined: tube B is empty on average");
    return mu(0) / mu(1);
}

Eigen::VectorXcd minimum_weights(const Ensemble& ensemble)
{
    Eigen::VectorXcd g(2);
    g << Complex(1.0, 0.0), Complex(-population_ratio(ensemble), 0.0);
    return g;
}

} // namespace qnd
