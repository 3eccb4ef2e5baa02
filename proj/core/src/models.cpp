#include "phaseret/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "phaseret/random.hpp"

namespace phaseret {

namespace {

constexpr double kPi = std::numbers::pi;

Complex draw_cn(std::mt19937_64& rng, std::normal_distribution<double>& dist) {
  // CN(0,1): independent N(0, 1/2) real and imaginary parts
  const double re = dist(rng);
  const double im = dist(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

struct TangentFrame {
  Eigen::Vector3d theta_hat;
  Eigen::Vector3d phi_hat;
};

TangentFrame tangent_frame(const Eigen::Vector3d& direction) {
  const double ct = std::clamp(direction.z(), -1.0, 1.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  double cp = 1.0;
  double sp = 0.0;
  if (st > 0.0) {
    cp = direction.x() / st;
    sp = direction.y() / st;
  }
  TangentFrame f;
  f.theta_hat = Eigen::Vector3d(ct * cp, ct * sp, -st);
  f.phi_hat = Eigen::Vector3d(-sp, cp, 0.0);
  return f;
}

Eigen::Vector3d direction_from_angles(double theta_rad, double phi_rad) {
  return {std::sin(theta_rad) * std::cos(phi_rad), std::sin(theta_rad) * std::sin(phi_rad),
          std::cos(theta_rad)};
}

/// Radiation-zone pattern of one dipole: lim R e^{+jkR} E(R r_hat), including
/// the source-position phase advance e^{+jk r_hat . r_d}.
Eigen::Vector3cd far_field_vector(const Dipole& d, Complex coefficient,
                                  const Eigen::Vector3d& r_hat, double k) {
  const Complex phase = std::polar(1.0, k * r_hat.dot(d.position));
  Eigen::Vector3d pattern;
  if (d.kind == DipoleKind::Electric) {
    pattern = d.orientation - r_hat.dot(d.orientation) * r_hat;
  } else {
    pattern = d.orientation.cross(r_hat);
  }
  return (coefficient * phase / k) * pattern.cast<Complex>();
}

}  // namespace

GaussianInstance sample_gaussian_instance(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) {
    throw std::invalid_argument("sample_gaussian_instance: n and m must be >= 1");
  }
  auto rng = make_engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  GaussianInstance inst;
  inst.seed = seed;
  inst.A.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      inst.A(i, j) = draw_cn(rng, dist);
    }
  }
  inst.z_true.resize(n);
  for (int j = 0; j < n; ++j) {
    inst.z_true[j] = draw_cn(rng, dist);
  }
  inst.b_true = inst.A * inst.z_true;
  return inst;
}

double aut_wavenumber(const DipoleAUT& aut) {
  return 2.0 * kPi * aut.frequency_hz / kSpeedOfLight;
}

Eigen::Vector3d aut_half_extent(const DipoleAUT& aut) {
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
  for (const auto& d : aut.dipoles) {
    h = h.cwiseMax(d.position.cwiseAbs());
  }
  return h;
}

DipoleAUT make_box_aut(const AutBoxSpec& spec) {
  if (spec.sites < 1 || spec.box_size_m <= 0.0 || spec.frequency_hz <= 0.0) {
    throw std::invalid_argument("make_box_aut: invalid specification");
  }
  const double half = spec.box_size_m / 2.0;
  const int per_face = (spec.sites + 5) / 6;
  const int gx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(per_face))));
  const int gy = (per_face + gx - 1) / gx;

  auto rng = make_engine(spec.seed);
  std::normal_distribution<double> dist(0.0, 1.0);

  DipoleAUT aut;
  aut.frequency_hz = spec.frequency_hz;
  int site = 0;
  for (int axis = 0; axis < 3 && site < spec.sites; ++axis) {
    for (int sign = 0; sign < 2 && site < spec.sites; ++sign) {
      const int t1_axis = (axis + 1) % 3;
      const int t2_axis = (axis + 2) % 3;
      int on_face = 0;
      for (int iu = 0; iu < gx && site < spec.sites && on_face < per_face; ++iu) {
        for (int iv = 0; iv < gy && site < spec.sites && on_face < per_face; ++iv) {
          ++on_face;
          // cell centers, inset from the face edges
          const double u = ((iu + 0.5) / gx * 2.0 - 1.0) * half * 0.9;
          const double v = ((iv + 0.5) / gy * 2.0 - 1.0) * half * 0.9;
          Eigen::Vector3d pos = Eigen::Vector3d::Zero();
          pos[axis] = (sign == 0 ? half : -half);
          pos[t1_axis] = u;
          pos[t2_axis] = v;
          if (spec.position_jitter_m > 0.0) {
            for (int c = 0; c < 3; ++c) {
              pos[c] += spec.position_jitter_m * dist(rng);
            }
          }
          Eigen::Vector3d t1 = Eigen::Vector3d::Zero();
          t1[t1_axis] = 1.0;
          Eigen::Vector3d t2 = Eigen::Vector3d::Zero();
          t2[t2_axis] = 1.0;
          const bool flip = (site % 2) != 0;
          aut.dipoles.push_back({pos, flip ? t2 : t1, DipoleKind::Electric});
          aut.dipoles.push_back({pos, flip ? t1 : t2, DipoleKind::Magnetic});
          ++site;
        }
      }
    }
  }
  aut.coefficients = ComplexVector::Zero(static_cast<Eigen::Index>(aut.dipoles.size()));
  return aut;
}

SamplingPlan make_random_plan(double radius_m, int count, std::uint64_t seed) {
  if (radius_m <= 0.0 || count < 1) {
    throw std::invalid_argument("make_random_plan: invalid radius or count");
  }
  auto rng = make_engine(seed);
  std::uniform_real_distribution<double> uz(-1.0, 1.0);
  std::uniform_real_distribution<double> uphi(0.0, 2.0 * kPi);
  SamplingPlan plan;
  plan.sphere_radius_m = radius_m;
  plan.seed = seed;
  plan.directions.reserve(static_cast<std::size_t>(count));
  plan.polarizations.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = uz(rng);
    const double phi = uphi(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    plan.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), z);
    plan.polarizations.push_back(i % 2 == 0 ? Polarization::Theta : Polarization::Phi);
  }
  return plan;
}

Eigen::Vector3cd dipole_field(const Dipole& dipole, Complex coefficient,
                              const Eigen::Vector3d& observation_point, double wavenumber) {
  const Eigen::Vector3d rvec = observation_point - dipole.position;
  const double r = rvec.norm();
  if (r == 0.0) {
    throw NumericalError("dipole_field: observation point coincides with the dipole");
  }
  const Eigen::Vector3d r_hat = rvec / r;
  const double kr = wavenumber * r;
  const Complex prop = std::polar(1.0, -kr);
  const Complex j(0.0, 1.0);
  if (dipole.kind == DipoleKind::Electric) {
    const double rp = r_hat.dot(dipole.orientation);
    const Eigen::Vector3d trans = dipole.orientation - rp * r_hat;
    const Eigen::Vector3d radial = 3.0 * rp * r_hat - dipole.orientation;
    const Complex near_terms = j / (kr * kr) + 1.0 / (kr * kr * kr);
    return coefficient * prop *
           (trans.cast<Complex>() / kr + radial.cast<Complex>() * near_terms);
  }
  const Eigen::Vector3d azim = dipole.orientation.cross(r_hat);
  const Complex f = 1.0 / kr - j / (kr * kr);
  return coefficient * prop * f * azim.cast<Complex>();
}

ComplexMatrix build_forward_operator(const DipoleAUT& aut, const SamplingPlan& plan,
                                     const ProbeArrayGeometry& array, int element_index) {
  if (element_index < 0 || element_index >= static_cast<int>(array.element_offsets.size())) {
    throw std::invalid_argument("build_forward_operator: element index out of range");
  }
  if (plan.directions.size() != plan.polarizations.size()) {
    throw std::invalid_argument("build_forward_operator: inconsistent sampling plan");
  }
  const double k = aut_wavenumber(aut);
  const Eigen::Vector2d off = array.element_offsets[static_cast<std::size_t>(element_index)];
  const Eigen::Vector3d half = aut_half_extent(aut);
  const auto m = static_cast<Eigen::Index>(plan.directions.size());
  const auto n = static_cast<Eigen::Index>(aut.dipoles.size());
  ComplexMatrix A(m, n);
  for (Eigen::Index s = 0; s < m; ++s) {
    const Eigen::Vector3d& dir = plan.directions[static_cast<std::size_t>(s)];
    const TangentFrame frame = tangent_frame(dir);
    const Eigen::Vector3d pos =
        plan.sphere_radius_m * dir + off.x() * frame.theta_hat + off.y() * frame.phi_hat;
    if ((pos.cwiseAbs().array() <= half.array()).all()) {
      throw std::invalid_argument("build_forward_operator: probe element displaced inside "
                                  "the AUT box");
    }
    const Eigen::Vector3d comp =
        plan.polarizations[static_cast<std::size_t>(s)] == Polarization::Theta ? frame.theta_hat
                                                                               : frame.phi_hat;
    for (Eigen::Index d = 0; d < n; ++d) {
      const Eigen::Vector3cd e =
          dipole_field(aut.dipoles[static_cast<std::size_t>(d)], Complex(1.0, 0.0), pos, k);
      A(s, d) = comp.cast<Complex>().dot(e);  // plain projection; comp is real
    }
  }
  return A;
}

ComplexVector add_noise(const ComplexVector& b, double snr_db, std::uint64_t seed) {
  if (b.size() == 0 || b.norm() == 0.0) {
    throw std::invalid_argument("add_noise: empty or zero measurement vector");
  }
  if (std::isinf(snr_db)) {
    return b;  // noiseless sentinel
  }
  auto rng = make_engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  // draws are independent of b so that scaling b scales the noise linearly
  ComplexVector noise(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    noise[i] = Complex(dist(rng), dist(rng)) / std::sqrt(2.0);
  }
  const double sigma = b.cwiseAbs().maxCoeff() * std::pow(10.0, -snr_db / 20.0);
  return b + sigma * noise;
}

FarFieldCut far_field_cut(const ComplexVector& coefficients, const DipoleAUT& aut,
                          double phi_deg, const std::vector<double>& theta_grid_deg,
                          Polarization component) {
  if (coefficients.size() != static_cast<Eigen::Index>(aut.dipoles.size())) {
    throw std::invalid_argument("far_field_cut: coefficient count does not match dipoles");
  }
  const double k = aut_wavenumber(aut);
  FarFieldCut cut;
  cut.theta_deg = theta_grid_deg;
  cut.component = component;
  cut.values = ComplexVector::Zero(static_cast<Eigen::Index>(theta_grid_deg.size()));
  for (std::size_t i = 0; i < theta_grid_deg.size(); ++i) {
    const double t = theta_grid_deg[i];
    if (t < -180.0 || t > 180.0) {
      throw std::invalid_argument("far_field_cut: theta outside [-180, 180] degrees");
    }
    const double theta = std::abs(t) * kPi / 180.0;
    const double phi = (phi_deg + (t < 0.0 ? 180.0 : 0.0)) * kPi / 180.0;
    const Eigen::Vector3d r_hat = direction_from_angles(theta, phi);
    const TangentFrame frame = tangent_frame(r_hat);
    const Eigen::Vector3d comp =
        component == Polarization::Theta ? frame.theta_hat : frame.phi_hat;
    Complex acc(0.0, 0.0);
    for (std::size_t d = 0; d < aut.dipoles.size(); ++d) {
      const Eigen::Vector3cd f = far_field_vector(
          aut.dipoles[d], coefficients[static_cast<Eigen::Index>(d)], r_hat, k);
      acc += comp.cast<Complex>().dot(f);
    }
    cut.values[static_cast<Eigen::Index>(i)] = acc;
  }
  return cut;
}

FarFieldCut far_field_cut(const ComplexVector& coefficients, const DipoleAUT& aut,
                          double phi_deg, const std::vector<double>& theta_grid_deg) {
  const FarFieldCut theta_cut =
      far_field_cut(coefficients, aut, phi_deg, theta_grid_deg, Polarization::Theta);
  const FarFieldCut phi_cut =
      far_field_cut(coefficients, aut, phi_deg, theta_grid_deg, Polarization::Phi);
  const double pt = theta_cut.values.size() ? theta_cut.values.cwiseAbs().maxCoeff() : 0.0;
  const double pp = phi_cut.values.size() ? phi_cut.values.cwiseAbs().maxCoeff() : 0.0;
  return pt >= pp ? theta_cut : phi_cut;
}

double condition_number(const ComplexMatrix& A) {
  Eigen::BDCSVD<ComplexMatrix> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv[0] / sv[sv.size() - 1];
}

}  // namespace phaseret
