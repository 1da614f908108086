/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/lowrank.hpp"

#include <cmath>

#include "nogin/errors.hpp"

namespace nogin {

LowRankPSD::LowRankPSD(Eigen::Index dim, double alpha) : dim_(dim), alpha_(alpha), c_(0.0) {
  if (dim < 1) throw config_error("LowRankPSD dimension must be >= 1");
  if (alpha < 0.0) throw config_error("LowRankPSD alpha must be >= 0");
  columns_.resize(dim, 0);
}

LowRankPSD::LowRankPSD(double alpha, double c, Eigen::MatrixXd columns)
    : dim_(columns.rows()), alpha_(alpha), c_(c), columns_(std::move(columns)) {
  if (dim_ < 1) throw config_error("LowRankPSD dimension must be >= 1");
  if (alpha < 0.0 || c < 0.0) throw config_error("LowRankPSD alpha and c must be >= 0");
  const Eigen::Index r = columns_.cols();
  if (r == 0) return;
  gram_ = columns_.transpose() * columns_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
  if (es.info() != Eigen::Success)
    throw numeric_error("LowRankPSD: Gram eigendecomposition failed");
  gram_eigs_ = es.eigenvalues();
  // Orthonormal basis of range(Lambda) for spectral sampling. Eigenvalues of
  // Lambda^T Lambda equal the nonzero eigenvalues of Lambda Lambda^T.
  const double cutoff = 1e-14 * std::max(1.0, gram_eigs_[r - 1]);
  Eigen::Index r_hat = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    if (gram_eigs_[i] > cutoff) ++r_hat;
  spectral_u_.resize(dim_, r_hat);
  spectral_s2_.resize(r_hat);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    if (gram_eigs_[i] <= cutoff) continue;
    spectral_s2_[k] = gram_eigs_[i];
    spectral_u_.col(k) = columns_ * es.eigenvectors().col(i) / std::sqrt(gram_eigs_[i]);
    ++k;
  }
}

bool LowRankPSD::is_zero() const {
  return alpha_ == 0.0 && (rank() == 0 || c_ == 0.0 || spectral_s2_.size() == 0);
}

Eigen::VectorXd LowRankPSD::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw numeric_error("LowRankPSD::apply: dimension mismatch");
  if (rank() == 0 || c_ == 0.0) return alpha_ * v;
  return alpha_ * v + c_ * (columns_ * (columns_.transpose() * v));
}

Eigen::VectorXd LowRankPSD::solve_woodbury(double a, double b, const Eigen::VectorXd& v) const {
  const double a_eff = a + b * alpha_;
  const double b_eff = b * c_;
  if (rank() == 0 || b_eff == 0.0) return v / a_eff;
  // (a' I + b' L L^T)^{-1} v = (v - L (a'/b' I + L^T L)^{-1} L^T v) / a'
  Eigen::MatrixXd core = gram_;
  core.diagonal().array() += a_eff / b_eff;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(core);
  if (ldlt.info() != Eigen::Success) {
    const double bound = a + b * (alpha_ + c_ * gram_eigs_[0]);
    throw numeric_error("solve_shifted: shifted operator is singular or indefinite", bound);
  }
  return (v - columns_ * ldlt.solve(columns_.transpose() * v)) / a_eff;
}

void LowRankPSD::verify_residual(double a, double b, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& v) const {
  const Eigen::VectorXd r = a * x + b * apply(x) - v;
  const double rel = r.norm() / std::max(v.norm(), 1e-300);
  if (!(rel <= 1e-10) || !x.allFinite()) {
    const double bound =
        a + b * (alpha_ + (rank() > 0 ? c_ * gram_eigs_[0] : 0.0));
    throw numeric_error("solve_shifted: residual check failed (operator near-singular)", bound);
  }
}

Eigen::VectorXd LowRankPSD::solve_shifted(double a, double b, const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw numeric_error("solve_shifted: dimension mismatch");
  const double a_eff = a + b * alpha_;
  if (!(a_eff > 0.0))
    throw numeric_error("solve_shifted: requires a + b*alpha > 0", a_eff);
  Eigen::VectorXd x = rank() > cg_rank_threshold() ? solve_shifted_cg(*this, a, b, v)
                                                   : solve_woodbury(a, b, v);
  verify_residual(a, b, x, v);
  return x;
}

std::pair<double, double> LowRankPSD::eig_bounds() const {
  if (rank() == 0 || c_ == 0.0 || spectral_s2_.size() == 0) return {alpha_, alpha_};
  const double top = alpha_ + c_ * spectral_s2_.maxCoeff();
  // Lambda Lambda^T is rank-deficient whenever r_hat < D, so alpha is attained.
  if (spectral_s2_.size() < dim_) return {alpha_, top};
  return {alpha_ + c_ * spectral_s2_.minCoeff(), top};
}

Eigen::VectorXd LowRankPSD::sample_gaussian(RngStream& rng, double a, double b) const {
  const double base = a + b * alpha_;
  if (base < 0.0)
    throw numeric_error("sample_gaussian: covariance is indefinite", base);
  Eigen::VectorXd z = rng.normal_vector(dim_);
  const double bc = b * c_;
  if (rank() == 0 || bc == 0.0 || spectral_s2_.size() == 0) return std::sqrt(base) * z;
  if (bc > 0.0) {
    // base*I + bc*L L^T factors directly: sqrt(base) z + sqrt(bc) L y.
    Eigen::VectorXd y = rng.normal_vector(rank());
    return std::sqrt(base) * z + std::sqrt(bc) * (columns_ * y);
  }
  // Subtractive case: rescale along the spectral directions of L L^T.
  const double sqrt_base = std::sqrt(base);
  Eigen::VectorXd uz = spectral_u_.transpose() * z;
  Eigen::VectorXd coef(spectral_s2_.size());
  for (Eigen::Index i = 0; i < spectral_s2_.size(); ++i) {
    const double eig = base + bc * spectral_s2_[i];
    if (eig < 0.0)
      throw numeric_error("sample_gaussian: covariance is indefinite", eig);
    coef[i] = std::sqrt(eig) - sqrt_base;
  }
  return sqrt_base * z + spectral_u_ * coef.cwiseProduct(uz);
}

Eigen::MatrixXd LowRankPSD::dense() const {
  Eigen::MatrixXd m = alpha_ * Eigen::MatrixXd::Identity(dim_, dim_);
  if (rank() > 0 && c_ != 0.0) m += c_ * columns_ * columns_.transpose();
  return m;
}

Eigen::VectorXd solve_shifted_cg(const LowRankPSD& s, double a, double b,
                                 const Eigen::VectorXd& v, double tol, Eigen::Index max_iter) {
  if (max_iter < 0) max_iter = 5 * s.dim();
  const auto op = [&](const Eigen::VectorXd& x) { return a * x + b * s.apply(x); };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd r = v;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double stop = tol * tol * v.squaredNorm();
  for (Eigen::Index it = 0; it < max_iter && rs > stop; ++it) {
    const Eigen::VectorXd ap = op(p);
    const double denom = p.dot(ap);
    if (!(denom > 0.0))
      throw numeric_error("solve_shifted_cg: operator not positive definite", denom);
    const double step = rs / denom;
    x += step * p;
    r -= step * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

}  // namespace nogin
