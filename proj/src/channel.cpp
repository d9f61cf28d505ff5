#include "aud/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aud {

namespace {

// One CN(0, variance) draw: real and imaginary parts N(0, variance/2).
Complex complex_gaussian(std::normal_distribution<double>& unit_normal, Rng& rng,
                         double std_per_part) {
  const double re = unit_normal(rng) * std_per_part;
  const double im = unit_normal(rng) * std_per_part;
  return Complex(re, im);
}

}  // namespace

Eigen::MatrixXcd build_los_channel(const UserField& field, const ArrayLayout& layout,
                                   bool use_estimated, bool unit_gain) {
  const int n_users = field.count();
  const int n_elements = layout.element_count;
  const Eigen::Matrix2Xd& positions =
      use_estimated ? field.estimated_positions : field.true_positions;
  if (!positions.allFinite()) {
    throw std::invalid_argument("build_los_channel: non-finite user position");
  }
  Eigen::MatrixXcd h(n_users, n_elements);
  const double lambda = layout.wavelength;
  for (int n = 0; n < n_users; ++n) {
    const double radius = positions.col(n).norm();
    if (radius <= 0.0) {
      throw std::invalid_argument("build_los_channel: user coincides with the array center");
    }
    const double gain = unit_gain ? 1.0 : lambda / (4.0 * M_PI * radius);
    for (int m = 0; m < n_elements; ++m) {
      const double dist = (positions.col(n) - layout.element_positions.col(m)).norm();
      if (dist <= 0.0) {
        throw std::invalid_argument("build_los_channel: user coincides with an array element");
      }
      const double phase = -2.0 * M_PI * dist / lambda;
      h(n, m) = gain * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return h;
}

Eigen::MatrixXcd sample_nlos(const UserField& field, const ArrayLayout& layout, Rng& rng) {
  const int n_users = field.count();
  const int n_elements = layout.element_count;
  Eigen::MatrixXcd h(n_users, n_elements);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  for (int n = 0; n < n_users; ++n) {
    const double alpha = layout.wavelength / (4.0 * M_PI * field.radii(n));
    const double std_per_part = alpha / std::sqrt(2.0);
    for (int m = 0; m < n_elements; ++m) {
      h(n, m) = complex_gaussian(unit_normal, rng, std_per_part);
    }
  }
  return h;
}

Eigen::MatrixXcd combine_rician(const Eigen::MatrixXcd& h_los, const Eigen::MatrixXcd& h_nlos,
                                double mu) {
  if (h_los.rows() != h_nlos.rows() || h_los.cols() != h_nlos.cols()) {
    throw std::invalid_argument("combine_rician: shape mismatch between LoS and NLoS");
  }
  if (std::isnan(mu) || mu < 0.0) {
    throw std::invalid_argument("combine_rician: mu must be >= 0 or infinite");
  }
  if (std::isinf(mu)) {
    return h_los;
  }
  const double los_coeff = std::sqrt(mu / (1.0 + mu));
  const double nlos_coeff = std::sqrt(1.0 / (1.0 + mu));
  return los_coeff * h_los + nlos_coeff * h_nlos;
}

ChannelSet build_channel_set(const UserField& field, const ArrayLayout& layout, double mu,
                             Rng& nlos_rng) {
  ChannelSet set;
  set.rician_mu = mu;
  set.h_los = build_los_channel(field, layout, /*use_estimated=*/false, /*unit_gain=*/false);
  set.h_nlos = sample_nlos(field, layout, nlos_rng);
  set.h_total = combine_rician(set.h_los, set.h_nlos, mu);
  set.h_hat = build_los_channel(field, layout, /*use_estimated=*/true, /*unit_gain=*/true);
  return set;
}

PilotMatrix generate_pilots(int pilot_length, int n_users, Rng& rng) {
  if (pilot_length < 1 || n_users < 1) {
    throw std::invalid_argument("generate_pilots: pilot_length and n_users must be >= 1");
  }
  PilotMatrix pilots;
  pilots.matrix.resize(pilot_length, n_users);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const double std_per_part = 1.0 / std::sqrt(2.0);
  for (int n = 0; n < n_users; ++n) {
    for (int t = 0; t < pilot_length; ++t) {
      pilots.matrix(t, n) = complex_gaussian(unit_normal, rng, std_per_part);
    }
    pilots.matrix.col(n) /= pilots.matrix.col(n).norm();
  }
  return pilots;
}

PilotMatrix orthonormalize_pilots(const PilotMatrix& pilots) {
  if (pilots.matrix.rows() < pilots.matrix.cols()) {
    throw std::invalid_argument("orthonormalize_pilots: requires pilot_length >= user_count");
  }
  PilotMatrix result;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(pilots.matrix);
  result.matrix = Eigen::MatrixXcd(qr.householderQ()).leftCols(pilots.matrix.cols());
  return result;
}

ActivityState sample_activity(int n_users, int nominal_active, const UserField& field,
                              double wavelength, Rng& rng, bool fixed_count) {
  if (nominal_active < 1 || nominal_active > n_users) {
    throw std::invalid_argument("sample_activity: requires 1 <= K <= N");
  }
  if (field.count() != n_users) {
    throw std::invalid_argument("sample_activity: field size does not match n_users");
  }
  ActivityState state;
  state.tx_powers.resize(n_users);
  state.x_diag = Eigen::VectorXd::Zero(n_users);
  for (int n = 0; n < n_users; ++n) {
    const double est_radius = field.estimated_positions.col(n).norm();
    const double sqrt_gamma = 4.0 * M_PI * est_radius / wavelength;
    state.tx_powers(n) = sqrt_gamma * sqrt_gamma;
  }

  if (fixed_count) {
    std::vector<int> order(n_users);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    state.active_set.assign(order.begin(), order.begin() + nominal_active);
    std::sort(state.active_set.begin(), state.active_set.end());
  } else {
    const double p = static_cast<double>(nominal_active) / n_users;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    // Resample empty realizations: the balanced-accuracy metric needs at
    // least one active user per trial.
    do {
      state.active_set.clear();
      for (int n = 0; n < n_users; ++n) {
        if (coin(rng) < p) {
          state.active_set.push_back(n);
        }
      }
    } while (state.active_set.empty());
  }

  for (int n : state.active_set) {
    state.x_diag(n) = std::sqrt(state.tx_powers(n));
  }
  return state;
}

ReceivedSignal synthesize_signal(const Eigen::MatrixXcd& pilots, const Eigen::VectorXd& x_diag,
                                 const Eigen::MatrixXcd& h_total, double noise_variance,
                                 Rng& rng) {
  if (pilots.cols() != x_diag.size() || x_diag.size() != h_total.rows()) {
    throw std::invalid_argument("synthesize_signal: incompatible shapes");
  }
  if (noise_variance < 0.0) {
    throw std::invalid_argument("synthesize_signal: noise variance must be >= 0");
  }
  const Eigen::Index t_len = pilots.rows();
  const Eigen::Index m_len = h_total.cols();
  ReceivedSignal signal;
  signal.noise_variance = noise_variance;
  signal.noise.resize(t_len, m_len);
  if (noise_variance > 0.0) {
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    const double std_per_part = std::sqrt(noise_variance / 2.0);
    for (Eigen::Index t = 0; t < t_len; ++t) {
      for (Eigen::Index m = 0; m < m_len; ++m) {
        signal.noise(t, m) = complex_gaussian(unit_normal, rng, std_per_part);
      }
    }
  } else {
    signal.noise.setZero();
  }
  signal.y = pilots * (x_diag.asDiagonal() * h_total) + signal.noise;
  return signal;
}

double noise_variance_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace aud
