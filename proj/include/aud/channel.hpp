#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "aud/geometry.hpp"
#include "aud/rng.hpp"

namespace aud {

using Complex = std::complex<double>;

/// LoS response: entry (n, m) = a_n * exp(-j * 2*pi * r_{n,m} / lambda) with
/// r_{n,m} the user-to-element distance. `use_estimated` picks p_hat_n over
/// p_n; `unit_gain` replaces the pathloss a_n = lambda / (4*pi*r_n) with 1.
/// The BS reconstruction H_hat is build_los_channel(field, layout, true, true).
Eigen::MatrixXcd build_los_channel(const UserField& field, const ArrayLayout& layout,
                                   bool use_estimated, bool unit_gain);

/// i.i.d. circularly-symmetric complex Gaussian entries; row n has per-entry
/// variance alpha_n^2 so the scattered power matches the LoS pathloss.
Eigen::MatrixXcd sample_nlos(const UserField& field, const ArrayLayout& layout, Rng& rng);

/// sqrt(mu/(1+mu)) * H_los + sqrt(1/(1+mu)) * H_nlos; mu = +inf returns H_los.
Eigen::MatrixXcd combine_rician(const Eigen::MatrixXcd& h_los, const Eigen::MatrixXcd& h_nlos,
                                double mu);

struct ChannelSet {
  Eigen::MatrixXcd h_los;    // N x M, pathloss-weighted
  Eigen::MatrixXcd h_nlos;   // N x M, pathloss-matched scattering
  Eigen::MatrixXcd h_total;  // Rician mix
  Eigen::MatrixXcd h_hat;    // BS reconstruction: estimated positions, unit gain
  double rician_mu = 0.0;    // +inf means pure LoS
};

ChannelSet build_channel_set(const UserField& field, const ArrayLayout& layout, double mu,
                             Rng& nlos_rng);

struct PilotMatrix {
  Eigen::MatrixXcd matrix;  // T x N, unit-norm columns

  int pilot_length() const { return static_cast<int>(matrix.rows()); }
  int user_count() const { return static_cast<int>(matrix.cols()); }
};

/// Columns drawn i.i.d. complex Gaussian, each scaled to unit l2 norm.
PilotMatrix generate_pilots(int pilot_length, int n_users, Rng& rng);

/// Replaces the columns with an orthonormal basis of their span (QR).
/// Requires pilot_length >= user_count. Used by noise-free sanity setups.
PilotMatrix orthonormalize_pilots(const PilotMatrix& pilots);

struct ActivityState {
  std::vector<int> active_set;  // sorted 0-based user indices
  Eigen::VectorXd tx_powers;    // gamma_n = (4*pi*|p_hat_n|/lambda)^2, all users
  Eigen::VectorXd x_diag;       // sqrt(gamma_n) for active users, else 0

  bool is_active(int n) const { return x_diag(n) != 0.0; }
};

/// Each user transmits independently with probability K/N (resampled if no
/// user ends up active); `fixed_count` instead picks exactly K distinct users.
/// Transmit power implements inverse power control from the location estimate.
ActivityState sample_activity(int n_users, int nominal_active, const UserField& field,
                              double wavelength, Rng& rng, bool fixed_count = false);

struct ReceivedSignal {
  Eigen::MatrixXcd y;          // T x M
  Eigen::MatrixXcd noise;      // V, kept for diagnostics
  double noise_variance = 0.0; // per-entry complex variance sigma_v^2
};

/// Y = Phi * diag(x) * H_total + V with V i.i.d. CN(0, noise_variance).
ReceivedSignal synthesize_signal(const Eigen::MatrixXcd& pilots, const Eigen::VectorXd& x_diag,
                                 const Eigen::MatrixXcd& h_total, double noise_variance,
                                 Rng& rng);

/// SNR convention: power control makes the per-entry received LoS power 1, so
/// SNR(dB) maps to sigma_v^2 = 10^(-snr_db/10).
double noise_variance_from_snr_db(double snr_db);

}  // namespace aud
