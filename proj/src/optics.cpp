#include "qnd/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qnd {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Tolerance for deciding alpha == 1 in the traveling-wave case.
constexpr double unit_ratio_tolerance = 1e-12;

} // namespace

std::string to_string(ModeKind kind)
{
    return kind == ModeKind::TravelingWave ? "traveling" : "standing";
}

ModeKind mode_kind_from_string(const std::string& name)
{
    if (name == "traveling" || name == "TravelingWave")
        return ModeKind::TravelingWave;
    if (name == "standing" || name == "StandingWave")
        return ModeKind::StandingWave;
    throw std::invalid_argument("unknown mode kind '" + name + "' (expected 'traveling' or 'standing')");
}

OpticalGeometry::OpticalGeometry(double wavelength,
                                 std::vector<double> tube_positions,
                                 ModeKind probe_kind,
                                 ModeKind detection_kind)
    : wavelength_(wavelength), probe_kind_(probe_kind), detection_kind_(detection_kind)
{
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw GeometryError("wavelength must be positive and finite");
    if (tube_positions.empty())
        throw GeometryError("geometry needs at least one tube");

    positions_.resize(static_cast<Eigen::Index>(tube_positions.size()));
    for (std::size_t i = 0; i < tube_positions.size(); ++i) {
        if (!std::isfinite(tube_positions[i]))
            throw GeometryError("tube positions must be finite");
        positions_(static_cast<Eigen::Index>(i)) = tube_positions[i] / wavelength;
    }

    std::sort(tube_positions.begin(), tube_positions.end());
    if (std::adjacent_find(tube_positions.begin(), tube_positions.end()) != tube_positions.end())
        throw GeometryError("tube positions must be pairwise distinct");
}

double OpticalGeometry::spacing(Eigen::Index i, Eigen::Index j) const
{
    return std::abs(positions_(j) - positions_(i));
}

Complex mode_value(ModeKind kind, double coordinate)
{
    const double phase = two_pi * coordinate;
    if (kind == ModeKind::StandingWave)
        return {std::cos(phase), 0.0};
    return {std::cos(phase), std::sin(phase)};
}

Complex mode_value(const OpticalGeometry& geometry, ModeKind kind, double coordinate)
{
    return mode_value(kind, coordinate / geometry.wavelength());
}

Complex phase_factor(const OpticalGeometry& geometry, Eigen::Index tube, double detection_angle)
{
    if (tube < 0 || tube >= geometry.tube_count())
        throw std::out_of_range("tube index out of range");
    if (!std::isfinite(detection_angle) || std::abs(detection_angle) > std::numbers::pi / 2)
        throw GeometryError("detection angle must lie in [-pi/2, pi/2]");

    const double y = geometry.position(tube);
    const Complex probe = mode_value(geometry.probe_kind(), y);
    if (detection_angle == 0.0)
        return probe;

    // Projection of the detected wave vector onto the tube's transverse axis.
    const double s = std::sin(detection_angle);
    if (geometry.detection_kind() == ModeKind::StandingWave)
        return probe * std::cos(two_pi * s * y);
    if (geometry.probe_kind() == ModeKind::TravelingWave)
        return mode_value(ModeKind::TravelingWave, (1.0 - s) * y);
    return probe * std::conj(mode_value(ModeKind::TravelingWave, s * y));
}

Eigen::VectorXcd phase_factors(const OpticalGeometry& geometry, double detection_angle)
{
    Eigen::VectorXcd f(geometry.tube_count());
    for (Eigen::Index i = 0; i < f.size(); ++i)
        f(i) = phase_factor(geometry, i, detection_angle);
    return f;
}

std::vector<double> minimum_spacings(double alpha, ModeKind probe_kind)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be positive and finite");

    if (probe_kind == ModeKind::TravelingWave) {
        if (std::abs(alpha - 1.0) > unit_ratio_tolerance)
            throw UnsatisfiableGeometryError(
                "a traveling probe only changes the phase between tubes; "
                "alpha must be 1 (use a standing-wave probe)");
        return {0.5};
    }

    if (alpha > 1.0)
        throw NoSolutionError(
            "cos(2 pi x) = -alpha has no solution for alpha > 1; "
            "relabel the tubes so that alpha = <N_A>/<N_B> <= 1");

    const double x = std::acos(-alpha) / two_pi;
    if (x == 0.5)
        return {0.5};
    return {x, 1.0 - x};
}

double rabi_frequency(const CouplingParams& params)
{
    if (!(params.hbar > 0.0))
        throw std::domain_error("hbar must be positive");
    return params.dipole_moment * params.probe_field / params.hbar;
}

Complex cavity_prefactor(const CouplingParams& params)
{
    if (params.detuning == 0.0)
        throw std::domain_error("zero detuning: resonant scattering is outside the model");
    if (!(params.cavity_decay > 0.0))
        throw std::domain_error("cavity decay rate must be positive");
    const double magnitude = params.coupling * rabi_frequency(params) / (params.detuning * params.cavity_decay);
    return {0.0, -magnitude};
}

} // namespace qnd
