#include "aud/admm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aud {

namespace {

void check_finite(const Eigen::MatrixXcd& iterate, const char* which, int outer, int inner) {
  if (!iterate.allFinite()) {
    throw std::runtime_error(std::string("admm: non-finite ") + which +
                             " iterate at outer=" + std::to_string(outer + 1) +
                             " inner=" + std::to_string(inner + 1));
  }
}

double log_sum_penalty(const Eigen::VectorXd& row_norms, double beta, double epsilon0) {
  return beta * (row_norms.array() + epsilon0).log().sum();
}

}  // namespace

std::vector<int> decide_active(const Eigen::VectorXd& scores, double threshold) {
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("decide_active: threshold must be >= 0");
  }
  std::vector<int> active;
  for (Eigen::Index n = 0; n < scores.size(); ++n) {
    if (scores(n) > threshold) {
      active.push_back(static_cast<int>(n));
    }
  }
  return active;
}

DetectionResult admm_li_solve(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& pilots,
                              const Eigen::MatrixXcd& h_hat, const AdmmConfig& cfg,
                              const LiObserver& observer, const SolveOptions& opts) {
  cfg.validate();
  const Eigen::Index t_len = pilots.rows();
  const Eigen::Index n = pilots.cols();
  const Eigen::Index m = h_hat.cols();
  if (h_hat.rows() != n || y.rows() != t_len || y.cols() != m) {
    throw std::invalid_argument("admm_li_solve: inconsistent shapes for Y, Phi, H_hat");
  }

  const double rho = cfg.rho;
  auto factor = assemble_and_factor_kron(h_hat, pilots, rho);
  const Eigen::MatrixXcd data_term = pilots.adjoint() * y * h_hat.adjoint();  // N x N

  Eigen::MatrixXcd x_mat = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd z_prev(n, n);
  Eigen::VectorXd weights(n);

  DetectionResult result;
  result.objective_per_outer.reserve(cfg.outer_iterations);

  for (int r = 0; r < cfg.outer_iterations; ++r) {
    weights = reweight(x_mat.diagonal().cwiseAbs(), cfg.epsilon0);
    for (int s = 0; s < cfg.inner_iterations; ++s) {
      if (opts.refactor_each_iteration) {
        factor = assemble_and_factor_kron(h_hat, pilots, rho);
      }
      z_prev = z;
      const Eigen::MatrixXcd rhs = data_term + rho * x_mat + w;
      const Eigen::VectorXcd z_vec = factor.solve(
          Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(rhs.data(), rhs.size())));
      z = Eigen::Map<const Eigen::MatrixXcd>(z_vec.data(), n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = z(i, i) - w(i, i) / rho;
        x_mat(i, i) = shrink_scalar(d, cfg.beta * weights(i) / rho);
      }
      w += rho * (x_mat - z);
      check_finite(z, "Z", r, s);
      check_finite(x_mat, "X", r, s);
      check_finite(w, "W", r, s);
      if (observer) {
        observer(LiIterate{r, s, x_mat.diagonal(), z, w, rhs, weights});
      }
    }
    const double fit = 0.5 * (pilots * x_mat * h_hat - y).squaredNorm();
    result.objective_per_outer.push_back(
        fit + log_sum_penalty(x_mat.diagonal().cwiseAbs(), cfg.beta, cfg.epsilon0));
  }

  result.scores = x_mat.diagonal().cwiseAbs();
  result.detected_set = decide_active(result.scores, cfg.activity_threshold);
  result.final_primal_residual = (x_mat - z).norm();
  result.final_dual_residual = rho * (z - z_prev).norm();
  return result;
}

DetectionResult admm_baseline_solve(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& pilots,
                                    const AdmmConfig& cfg, const BaselineObserver& observer,
                                    const SolveOptions& opts) {
  cfg.validate();
  const Eigen::Index t_len = pilots.rows();
  const Eigen::Index n = pilots.cols();
  const Eigen::Index m = y.cols();
  if (y.rows() != t_len) {
    throw std::invalid_argument("admm_baseline_solve: Y rows must equal pilot length");
  }

  const double rho = cfg.rho;
  auto factor = factor_plain(pilots, rho);
  const Eigen::MatrixXcd data_term = pilots.adjoint() * y;  // N x M

  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, m);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(n, m);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, m);
  Eigen::MatrixXcd z_prev(n, m);
  Eigen::VectorXd weights(n);

  DetectionResult result;
  result.objective_per_outer.reserve(cfg.outer_iterations);

  for (int r = 0; r < cfg.outer_iterations; ++r) {
    weights = reweight(j.rowwise().norm(), cfg.epsilon0);
    for (int s = 0; s < cfg.inner_iterations; ++s) {
      if (opts.refactor_each_iteration) {
        factor = factor_plain(pilots, rho);
      }
      z_prev = z;
      const Eigen::MatrixXcd rhs = data_term + rho * j + w;
      z = factor.solve(rhs);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXcd d = (z.row(i) - w.row(i) / rho).transpose();
        j.row(i) = shrink_row(d, cfg.beta * weights(i) / rho).transpose();
      }
      w += rho * (j - z);
      check_finite(z, "Z", r, s);
      check_finite(j, "J", r, s);
      check_finite(w, "W", r, s);
      if (observer) {
        observer(BaselineIterate{r, s, j, z, w, rhs, weights});
      }
    }
    const double fit = 0.5 * (pilots * j - y).squaredNorm();
    result.objective_per_outer.push_back(
        fit + log_sum_penalty(j.rowwise().norm(), cfg.beta, cfg.epsilon0));
  }

  result.scores = j.rowwise().norm();
  result.detected_set = decide_active(result.scores, cfg.activity_threshold);
  result.final_primal_residual = (j - z).norm();
  result.final_dual_residual = rho * (z - z_prev).norm();
  return result;
}

}  // namespace aud
