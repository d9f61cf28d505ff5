#include "aud/solver_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aud {

void AdmmConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("AdmmConfig: beta must be positive and finite");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("AdmmConfig: rho must be positive and finite");
  }
  if (!(epsilon0 > 0.0) || !std::isfinite(epsilon0)) {
    throw std::invalid_argument("AdmmConfig: epsilon0 must be positive and finite");
  }
  if (outer_iterations < 1) {
    throw std::invalid_argument("AdmmConfig: outer_iterations must be >= 1");
  }
  if (inner_iterations < 1) {
    throw std::invalid_argument("AdmmConfig: inner_iterations must be >= 1");
  }
  if (!(activity_threshold >= 0.0)) {
    throw std::invalid_argument("AdmmConfig: activity_threshold must be >= 0");
  }
}

Eigen::VectorXd reweight(const Eigen::VectorXd& row_norms, double epsilon0) {
  if (!(epsilon0 > 0.0)) {
    throw std::invalid_argument("reweight: epsilon0 must be positive");
  }
  return (row_norms.array() + epsilon0).inverse().matrix();
}

Complex shrink_scalar(Complex d, double threshold) {
  const double mag = std::abs(d);
  if (mag <= threshold || mag == 0.0) {
    return Complex(0.0, 0.0);
  }
  return d * ((mag - threshold) / mag);
}

Eigen::VectorXcd shrink_row(const Eigen::VectorXcd& d, double threshold) {
  const double norm = d.norm();
  if (norm <= threshold || norm == 0.0) {
    return Eigen::VectorXcd::Zero(d.size());
  }
  return d * ((norm - threshold) / norm);
}

HpdFactorization::HpdFactorization(Eigen::MatrixXcd system, SystemStructure structure)
    : structure_(structure) {
  llt_.compute(std::move(system));
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error(
        "HpdFactorization: Cholesky failed, system matrix is not positive definite "
        "(rho <= 0 or corrupted input)");
  }
}

Eigen::VectorXcd HpdFactorization::solve(const Eigen::VectorXcd& rhs) const {
  if (rhs.size() != dimension()) {
    throw std::invalid_argument("HpdFactorization: rhs size " + std::to_string(rhs.size()) +
                                " does not match system dimension " +
                                std::to_string(dimension()));
  }
  return llt_.solve(rhs);
}

Eigen::MatrixXcd HpdFactorization::solve(const Eigen::MatrixXcd& rhs) const {
  if (rhs.rows() != dimension()) {
    throw std::invalid_argument("HpdFactorization: rhs rows " + std::to_string(rhs.rows()) +
                                " do not match system dimension " +
                                std::to_string(dimension()));
  }
  return llt_.solve(rhs);
}

HpdFactorization assemble_and_factor_kron(const Eigen::MatrixXcd& h_hat,
                                          const Eigen::MatrixXcd& pilots, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("assemble_and_factor_kron: rho must be positive and finite");
  }
  const Eigen::Index n = h_hat.rows();
  if (pilots.cols() != n) {
    throw std::invalid_argument("assemble_and_factor_kron: pilot columns must equal H_hat rows");
  }
  const Eigen::MatrixXcd gram_h = h_hat * h_hat.adjoint();    // N x N, Hermitian
  const Eigen::MatrixXcd gram_p = pilots.adjoint() * pilots;  // N x N, Hermitian
  Eigen::MatrixXcd system(n * n, n * n);
  // (G^T kron P): block (ib, jb) is G(jb, ib) * P.
  for (Eigen::Index jb = 0; jb < n; ++jb) {
    for (Eigen::Index ib = 0; ib < n; ++ib) {
      system.block(ib * n, jb * n, n, n) = gram_h(jb, ib) * gram_p;
    }
  }
  system.diagonal().array() += rho;
  return HpdFactorization(std::move(system), SystemStructure::kronecker);
}

HpdFactorization factor_plain(const Eigen::MatrixXcd& pilots, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("factor_plain: rho must be positive and finite");
  }
  Eigen::MatrixXcd system = pilots.adjoint() * pilots;
  system.diagonal().array() += rho;
  return HpdFactorization(std::move(system), SystemStructure::plain);
}

}  // namespace aud
