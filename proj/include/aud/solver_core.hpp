#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace aud {

using Complex = std::complex<double>;

// Hyper-parameters shared by both detectors. Defaults follow the reference
// operating point: beta = 1e-5, rho = 0.1, epsilon0 = 0.1, R = S = 10.
struct AdmmConfig {
  double beta = 1e-5;
  double rho = 0.1;
  double epsilon0 = 0.1;
  int outer_iterations = 10;
  int inner_iterations = 10;
  double activity_threshold = 0.5;

  void validate() const;
};

// MM reweighting: nu_n = 1 / (epsilon0 + norm_n).
Eigen::VectorXd reweight(const Eigen::VectorXd& row_norms, double epsilon0);

// Complex soft threshold: (d/|d|) * max(0, |d| - threshold); 0 maps to 0.
Complex shrink_scalar(Complex d, double threshold);

// Row-wise (group) soft threshold: (d/||d||) * max(0, ||d|| - threshold).
Eigen::VectorXcd shrink_row(const Eigen::VectorXcd& d, double threshold);

enum class SystemStructure { kronecker, plain };

// Cholesky factor of a Hermitian positive-definite system matrix, built once
// per trial and reused across every inner iteration.
class HpdFactorization {
 public:
  HpdFactorization(Eigen::MatrixXcd system, SystemStructure structure);

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

  Eigen::Index dimension() const { return llt_.matrixLLT().rows(); }
  SystemStructure structure() const { return structure_; }

 private:
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  SystemStructure structure_;
};

// Assembles A = (H_hat H_hat^H)^T kron (Phi^H Phi) + rho I_{N^2} and factors
// it. Column-stacking vec convention: vec(P Z G) = (G^T kron P) vec(Z).
HpdFactorization assemble_and_factor_kron(const Eigen::MatrixXcd& h_hat,
                                          const Eigen::MatrixXcd& pilots, double rho);

// Assembles and factors Phi^H Phi + rho I_N.
HpdFactorization factor_plain(const Eigen::MatrixXcd& pilots, double rho);

}  // namespace aud
