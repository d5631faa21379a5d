#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qnd {

using Complex = std::complex<double>;

/// Spatial form of a probe or detected light mode.
enum class ModeKind { TravelingWave, StandingWave };

std::string to_string(ModeKind kind);
ModeKind mode_kind_from_string(const std::string& name);

/// Raised when an optical geometry cannot be built or a requested
/// interference condition cannot be realized.
class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The standing-wave minimum needs cos(2 pi x) = -alpha, impossible for alpha > 1.
class NoSolutionError : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

/// A pure phase cannot produce an amplitude ratio with modulus other than one.
class UnsatisfiableGeometryError : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

/// Probe/detection geometry for a set of parallel tubes.
///
/// Tube coordinates are transverse (along y) and are stored in units of the
/// light wavelength, so the wavenumber used internally is always 2 pi.
class OpticalGeometry {
  public:
    OpticalGeometry(double wavelength,
                    std::vector<double> tube_positions,
                    ModeKind probe_kind,
                    ModeKind detection_kind = ModeKind::TravelingWave);

    double wavelength() const { return wavelength_; }
    Eigen::Index tube_count() const { return positions_.size(); }
    ModeKind probe_kind() const { return probe_kind_; }
    ModeKind detection_kind() const { return detection_kind_; }

    /// Tube coordinate in units of the wavelength.
    double position(Eigen::Index tube) const { return positions_(tube); }
    const Eigen::VectorXd& positions() const { return positions_; }

    /// Spacing |y_j - y_i| in units of the wavelength.
    double spacing(Eigen::Index i, Eigen::Index j) const;

  private:
    double wavelength_;
    Eigen::VectorXd positions_;
    ModeKind probe_kind_;
    ModeKind detection_kind_;
};

/// exp(iky) or cos(ky) at a coordinate given in units of the wavelength.
Complex mode_value(ModeKind kind, double coordinate);

/// Same, with the coordinate in the geometry's absolute length units.
Complex mode_value(const OpticalGeometry& geometry, ModeKind kind, double coordinate);

/// Per-tube scattering factor u_p(y_i) * conj(u_s(y_i)) for detection in the
/// plane perpendicular to the tubes, at `detection_angle` measured from z
/// toward y. Angle zero gives the probe mode value exactly.
Complex phase_factor(const OpticalGeometry& geometry, Eigen::Index tube, double detection_angle);

/// All tube factors at one detection angle.
Eigen::VectorXcd phase_factors(const OpticalGeometry& geometry, double detection_angle);

/// Spacings x = Delta / lambda in [0, 1) placing a diffraction minimum on the
/// detector for population ratio alpha = <N_A>/<N_B>, with tube A on a probe
/// antinode. Sorted ascending; integer periods may be added by the caller.
std::vector<double> minimum_spacings(double alpha, ModeKind probe_kind);

/// Molecule-light coupling constants (any consistent unit system).
struct CouplingParams {
    double dipole_moment = 1.0;
    double probe_field = 1.0;
    double hbar = 1.0;
    double coupling = 1.0;
    double detuning = 1.0;
    double cavity_decay = 1.0;
};

/// Omega_p = d_0 E_p / hbar.
double rabi_frequency(const CouplingParams& params);

/// C = -i g_s Omega_p / (Delta_a kappa). Throws std::domain_error when
/// Delta_a == 0 or kappa <= 0.
Complex cavity_prefactor(const CouplingParams& params);

} // namespace qnd
