#pragma once

#include <cstdint>
#include <vector>

#include "phaseret/numerics.hpp"

namespace phaseret {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Complex-Gaussian test instance: i.i.d. CN(0,1) operator and solution,
/// b_true = A z_true. Deterministic per seed.
struct GaussianInstance {
  ComplexMatrix A;
  ComplexVector z_true;
  ComplexVector b_true;
  std::uint64_t seed = 0;
};

GaussianInstance sample_gaussian_instance(int n, int m, std::uint64_t seed);

enum class DipoleKind { Electric, Magnetic };

struct Dipole {
  Eigen::Vector3d position;
  Eigen::Vector3d orientation;  // unit vector
  DipoleKind kind = DipoleKind::Electric;
};

/// Equivalent-source antenna model: Hertzian/Fitzgerald dipoles tangential on
/// an enclosing box, with complex excitation coefficients.
struct DipoleAUT {
  std::vector<Dipole> dipoles;
  ComplexVector coefficients;  // length = dipole count (zero for inversion bases)
  double frequency_hz = 0.0;
};

double aut_wavenumber(const DipoleAUT& aut);

/// Half-extents of the smallest axis-aligned box containing all dipoles.
Eigen::Vector3d aut_half_extent(const DipoleAUT& aut);

struct AutBoxSpec {
  double box_size_m = 0.022;      // full edge length of the enclosing box
  int sites = 54;                 // dipole sites; each carries one electric + one magnetic
  double frequency_hz = 2.6e9;
  double position_jitter_m = 0.0;
  std::uint64_t seed = 0;         // used only when jitter > 0
};

/// Regular tangential placement on the six box faces; each site hosts one
/// electric and one magnetic dipole along the two face tangents (alternating
/// assignment per site). Coefficients are zero-initialized.
DipoleAUT make_box_aut(const AutBoxSpec& spec);

/// Probe-array element offsets in the local transverse (theta, phi) frame of
/// the nominal probe position; element 0 sits at (0, 0).
struct ProbeArrayGeometry {
  std::vector<Eigen::Vector2d> element_offsets;
};

enum class Polarization { Theta, Phi };

struct SamplingPlan {
  double sphere_radius_m = 1.5;
  std::vector<Eigen::Vector3d> directions;     // unit vectors
  std::vector<Polarization> polarizations;     // per sample
  std::uint64_t seed = 0;
};

/// Uniformly random directions on the sphere with alternating theta/phi
/// polarization per sample. Deterministic per seed.
SamplingPlan make_random_plan(double radius_m, int count, std::uint64_t seed);

/// Unit-coefficient electric field of a single dipole at an observation point
/// (e^{+j omega t} convention, e^{-jkR} propagation), scaled by `coefficient`.
/// Electric dipoles carry 1/(kR), 1/(kR)^2, 1/(kR)^3 terms; magnetic ones the
/// dual azimuthal 1/(kR), 1/(kR)^2 field.
Eigen::Vector3cd dipole_field(const Dipole& dipole, Complex coefficient,
                              const Eigen::Vector3d& observation_point, double wavenumber);

/// Rows: samples of the plan; columns: dipoles at unit coefficient. The probe
/// position is the sphere point displaced by the element offset within the
/// local (theta, phi) tangent plane; the measured component is the plan's
/// polarization in the nominal point's frame. Ideal probes.
ComplexMatrix build_forward_operator(const DipoleAUT& aut, const SamplingPlan& plan,
                                     const ProbeArrayGeometry& array, int element_index);

/// Additive circularly-symmetric complex Gaussian noise with per-sample sigma
/// = max|b| 10^{-snr/20}. An infinite snr_db returns b unchanged.
ComplexVector add_noise(const ComplexVector& b, double snr_db, std::uint64_t seed);

struct FarFieldCut {
  std::vector<double> theta_deg;
  ComplexVector values;
  Polarization component = Polarization::Theta;
};

/// Radiation (1/R) far-field component along a constant-phi cut; negative
/// theta maps to the (|theta|, phi+180 deg) direction. Picks the polarization
/// with the larger peak magnitude.
FarFieldCut far_field_cut(const ComplexVector& coefficients, const DipoleAUT& aut,
                          double phi_deg, const std::vector<double>& theta_grid_deg);

/// Same cut with the polarization fixed by the caller (used to evaluate a
/// result against a reference on the reference's dominant component).
FarFieldCut far_field_cut(const ComplexVector& coefficients, const DipoleAUT& aut,
                          double phi_deg, const std::vector<double>& theta_grid_deg,
                          Polarization component);

/// Ratio of the largest to smallest singular value.
double condition_number(const ComplexMatrix& A);

}  // namespace phaseret
