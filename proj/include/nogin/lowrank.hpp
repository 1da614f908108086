/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#pragma once

#include <Eigen/Dense>
#include <utility>

#include "nogin/rng.hpp"

namespace nogin {

// Symmetric PSD operator S = alpha*I + c * Lambda Lambda^T with Lambda D x r,
// r << D. Applies and solves run in O(D r) / O(D r^2) without ever forming
// the D x D matrix. Immutable after construction, safe to share across chains.
class LowRankPSD {
 public:
  LowRankPSD() : LowRankPSD(1, 0.0) {}
  LowRankPSD(Eigen::Index dim, double alpha);
  LowRankPSD(double alpha, double c, Eigen::MatrixXd columns);

  static LowRankPSD zero(Eigen::Index dim) { return LowRankPSD(dim, 0.0); }
  static LowRankPSD scaled_identity(Eigen::Index dim, double alpha) {
    return LowRankPSD(dim, alpha);
  }

  Eigen::Index dim() const { return dim_; }
  Eigen::Index rank() const { return columns_.cols(); }
  double alpha() const { return alpha_; }
  double scale() const { return c_; }
  const Eigen::MatrixXd& columns() const { return columns_; }
  bool is_zero() const;

  // S v = alpha v + c Lambda (Lambda^T v).
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  // (a I + b S)^{-1} v to relative residual <= 1e-10. Requires a + b*alpha > 0.
  // Uses the Woodbury identity through the r x r core matrix; falls back to
  // conjugate gradient when r exceeds cg_rank_threshold() (default D/2).
  Eigen::VectorXd solve_shifted(double a, double b, const Eigen::VectorXd& v) const;

  // (lambda_min, lambda_max) of S. lambda_min = alpha whenever r < D.
  std::pair<double, double> eig_bounds() const;

  // Draw from N(0, a I + b S); requires a + b*eig(S) >= 0 across the spectrum.
  Eigen::VectorXd sample_gaussian(RngStream& rng, double a, double b) const;

  Eigen::MatrixXd dense() const;

  Eigen::Index cg_rank_threshold() const { return dim_ / 2; }

 private:
  Eigen::VectorXd solve_woodbury(double a, double b, const Eigen::VectorXd& v) const;
  void verify_residual(double a, double b, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const;

  Eigen::Index dim_;
  double alpha_;
  double c_;
  Eigen::MatrixXd columns_;  // D x r
  Eigen::MatrixXd gram_;     // Lambda^T Lambda, r x r
  Eigen::VectorXd gram_eigs_;  // eigenvalues of the Gram matrix, ascending
  Eigen::MatrixXd spectral_u_;  // D x r_hat orthonormal basis of range(Lambda)
  Eigen::VectorXd spectral_s2_;  // matching nonzero eigenvalues of Lambda Lambda^T
};

// Conjugate-gradient solve of (a I + b S) x = v; exposed so the Woodbury path
// and the iterative path can be cross-checked directly.
Eigen::VectorXd solve_shifted_cg(const LowRankPSD& s, double a, double b,
                                 const Eigen::VectorXd& v, double tol = 1e-10,
                                 Eigen::Index max_iter = -1);

}  // namespace nogin
