#include "aud/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aud {

ArrayLayout ArrayLayout::uniform_linear(int element_count, double carrier_hz) {
  if (element_count < 1) {
    throw std::invalid_argument("ArrayLayout: element_count must be positive");
  }
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
    throw std::invalid_argument("ArrayLayout: carrier frequency must be positive and finite");
  }
  ArrayLayout layout;
  layout.element_count = element_count;
  layout.carrier_hz = carrier_hz;
  layout.wavelength = kSpeedOfLight / carrier_hz;
  layout.element_positions.resize(2, element_count);
  const double lambda = layout.wavelength;
  for (int m = 0; m < element_count; ++m) {
    layout.element_positions(0, m) = 0.0;
    layout.element_positions(1, m) = m * lambda - (element_count - 1) * lambda / 2.0;
  }
  // Generic max pairwise distance; reduces to (M-1)*lambda for this layout.
  double aperture = 0.0;
  for (int i = 0; i < element_count; ++i) {
    for (int j = i + 1; j < element_count; ++j) {
      const double d = (layout.element_positions.col(i) - layout.element_positions.col(j)).norm();
      aperture = std::max(aperture, d);
    }
  }
  layout.aperture = aperture;
  return layout;
}

double rayleigh_distance(const ArrayLayout& layout) {
  return 2.0 * layout.aperture * layout.aperture / layout.wavelength;
}

double fresnel_distance(const ArrayLayout& layout) {
  return 0.62 * std::sqrt(std::pow(layout.aperture, 3) / layout.wavelength);
}

DeploymentRegion::DeploymentRegion(double r_min_in, double r_max_in, double theta_min_in,
                                   double theta_max_in, const ArrayLayout& layout)
    : r_min(r_min_in), r_max(r_max_in), theta_min(theta_min_in), theta_max(theta_max_in) {
  if (!(r_min > 0.0) || !(r_min < r_max)) {
    throw std::invalid_argument("DeploymentRegion: requires 0 < r_min < r_max");
  }
  if (!(theta_min < theta_max)) {
    throw std::invalid_argument("DeploymentRegion: requires theta_min < theta_max");
  }
  const double lower = fresnel_distance(layout);
  const double upper = rayleigh_distance(layout);
  if (r_min < lower) {
    throw std::invalid_argument(
        "DeploymentRegion: near-field violation, r_min = " + std::to_string(r_min) +
        " m is below the Fresnel bound 0.62*sqrt(D^3/lambda) = " + std::to_string(lower) + " m");
  }
  if (r_max > upper) {
    throw std::invalid_argument(
        "DeploymentRegion: near-field violation, r_max = " + std::to_string(r_max) +
        " m exceeds the Rayleigh distance 2*D^2/lambda = " + std::to_string(upper) + " m");
  }
}

UserField sample_user_field(const DeploymentRegion& region, int n_users, double error_std,
                            Rng& rng) {
  if (n_users < 1) {
    throw std::invalid_argument("sample_user_field: n_users must be >= 1");
  }
  if (error_std < 0.0) {
    throw std::invalid_argument("sample_user_field: error_std must be >= 0");
  }
  UserField field;
  field.error_std = error_std;
  field.true_positions.resize(2, n_users);
  field.estimated_positions.resize(2, n_users);
  field.radii.resize(n_users);
  field.angles.resize(n_users);
  field.displacement_magnitudes.resize(n_users);

  std::uniform_real_distribution<double> radius_dist(region.r_min, region.r_max);
  std::uniform_real_distribution<double> angle_dist(region.theta_min, region.theta_max);
  std::uniform_real_distribution<double> direction_dist(0.0, 2.0 * M_PI);
  std::normal_distribution<double> radial_error_dist(0.0, error_std > 0.0 ? error_std : 1.0);

  for (int n = 0; n < n_users; ++n) {
    const double r = radius_dist(rng);
    const double theta = angle_dist(rng);
    field.radii(n) = r;
    field.angles(n) = theta;
    field.true_positions(0, n) = r * std::cos(theta);
    field.true_positions(1, n) = r * std::sin(theta);

    double displacement = 0.0;
    if (error_std > 0.0) {
      displacement = std::abs(radial_error_dist(rng));
      const double phi = direction_dist(rng);
      field.estimated_positions(0, n) = field.true_positions(0, n) + displacement * std::cos(phi);
      field.estimated_positions(1, n) = field.true_positions(1, n) + displacement * std::sin(phi);
    } else {
      field.estimated_positions.col(n) = field.true_positions.col(n);
    }
    field.displacement_magnitudes(n) = displacement;
  }
  return field;
}

}  // namespace aud
