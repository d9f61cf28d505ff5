#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "aud/solver_core.hpp"

namespace aud {

struct DetectionResult {
  std::vector<int> detected_set;
  Eigen::VectorXd scores;
  double final_primal_residual = 0.0;
  double final_dual_residual = 0.0;
  // Relaxed log-sum objective after each outer (reweighting) iteration,
  // recorded as an MM monotonicity diagnostic.
  std::vector<double> objective_per_outer;
};

// { n : scores[n] > threshold }, 0-based indices.
std::vector<int> decide_active(const Eigen::VectorXd& scores, double threshold);

// Snapshot taken after every inner iteration, for invariant tests. z_rhs is
// the right-hand side the Z-update solved against in this iteration.
struct LiIterate {
  int outer = 0;
  int inner = 0;
  Eigen::VectorXcd x_diag;
  Eigen::MatrixXcd z;
  Eigen::MatrixXcd w;
  Eigen::MatrixXcd z_rhs;
  Eigen::VectorXd weights;
};
using LiObserver = std::function<void(const LiIterate&)>;

struct BaselineIterate {
  int outer = 0;
  int inner = 0;
  Eigen::MatrixXcd j;
  Eigen::MatrixXcd z;
  Eigen::MatrixXcd w;
  Eigen::MatrixXcd z_rhs;
  Eigen::VectorXd weights;
};
using BaselineObserver = std::function<void(const BaselineIterate&)>;

struct SolveOptions {
  // Rebuild the system factorization every inner iteration instead of once
  // per call. Only useful for benchmarking the factor-reuse speedup.
  bool refactor_each_iteration = false;
};

// Location-aided detector: solves
//   min 1/2 ||Phi Z H_hat - Y||_F^2 + beta sum_n nu_n |x_n|  s.t.  X = Z
// with X diagonal, warm-started over outer reweighting iterations.
// Scores are |X[n,n]|.
DetectionResult admm_li_solve(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& pilots,
                              const Eigen::MatrixXcd& h_hat, const AdmmConfig& cfg,
                              const LiObserver& observer = nullptr,
                              const SolveOptions& opts = {});

// Location-free detector: solves
//   min 1/2 ||Phi Z - Y||_F^2 + beta sum_n nu_n ||j_n||_2  s.t.  J = Z
// over N x M iterates. Scores are row norms ||j_n||_2.
DetectionResult admm_baseline_solve(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& pilots,
                                    const AdmmConfig& cfg,
                                    const BaselineObserver& observer = nullptr,
                                    const SolveOptions& opts = {});

}  // namespace aud
