#pragma once

#include <Eigen/Dense>

#include "aud/rng.hpp"

namespace aud {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Uniform linear antenna array on the Y axis, centered at the origin.
/// Element m (1-based) sits at [0, (m-1)*lambda - (M-1)*lambda/2].
struct ArrayLayout {
  int element_count = 0;               // M
  double carrier_hz = 0.0;             // f
  double wavelength = 0.0;             // lambda = c / f
  Eigen::Matrix2Xd element_positions;  // 2 x M, meters
  double aperture = 0.0;               // D, max pairwise element distance

  static ArrayLayout uniform_linear(int element_count, double carrier_hz);
};

/// Rayleigh distance 2 D^2 / lambda: upper edge of the radiative near-field.
double rayleigh_distance(const ArrayLayout& layout);

/// Fresnel bound 0.62 sqrt(D^3 / lambda): lower edge of the radiative near-field.
double fresnel_distance(const ArrayLayout& layout);

/// Annular sector the users may occupy. Construction validates that the whole
/// sector lies in the radiative near-field of the given array.
struct DeploymentRegion {
  double r_min = 0.0;
  double r_max = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;

  DeploymentRegion(double r_min, double r_max, double theta_min, double theta_max,
                   const ArrayLayout& layout);
};

struct UserField {
  Eigen::Matrix2Xd true_positions;       // p_n, 2 x N
  Eigen::Matrix2Xd estimated_positions;  // p_hat_n, 2 x N
  Eigen::VectorXd radii;                 // r_n = |p_n|
  Eigen::VectorXd angles;                // theta_n
  Eigen::VectorXd displacement_magnitudes;  // |r_err| per user
  double error_std = 0.0;                // sigma

  int count() const { return static_cast<int>(true_positions.cols()); }
};

/// Draws N users uniformly in (r, theta) over the region, plus a location
/// estimate displaced from the truth by |r_err| in a uniform random direction,
/// r_err ~ N(0, sigma^2).
UserField sample_user_field(const DeploymentRegion& region, int n_users, double error_std,
                            Rng& rng);

}  // namespace aud
