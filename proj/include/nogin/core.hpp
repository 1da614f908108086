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
#include <cstdint>
#include <limits>
#include <vector>

#include "nogin/rng.hpp"

namespace nogin {

// Position/momentum pair advanced by every sampler.
struct State {
  Eigen::VectorXd theta;
  Eigen::VectorXd p;

  Eigen::Index dim() const { return theta.size(); }
  bool finite() const { return theta.allFinite() && p.allFinite(); }
};

// Mass matrix: identity, positive diagonal, or dense SPD.
// The dense case keeps a Cholesky factor from construction: both sampling
// N(0, M/beta) and applying M^{-1} need it.
class MassSpec {
 public:
  enum class Kind { identity, diagonal, dense };

  MassSpec() : kind_(Kind::identity) {}

  static MassSpec identity() { return MassSpec(); }
  static MassSpec diagonal(const Eigen::VectorXd& entries);  // entries > 0
  static MassSpec dense(const Eigen::MatrixXd& m);           // symmetric positive definite

  Kind kind() const { return kind_; }
  // identity accepts any dimension; reports -1.
  Eigen::Index dim() const;
  bool is_identity() const { return kind_ == Kind::identity; }
  // m*I for some scalar m (identity counts, m = 1).
  bool is_isotropic() const;
  double iso_value() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;        // M v
  Eigen::VectorXd apply_inv(const Eigen::VectorXd& v) const;    // M^{-1} v
  Eigen::VectorXd chol_mul(const Eigen::VectorXd& v) const;     // L v, M = L L^T
  Eigen::VectorXd chol_solve(const Eigen::VectorXd& v) const;   // L^{-1} v
  Eigen::VectorXd cholT_solve(const Eigen::VectorXd& v) const;  // L^{-T} v
  Eigen::MatrixXd chol_matrix(Eigen::Index d) const;            // L as dense d x d

 private:
  Kind kind_;
  Eigen::VectorXd diag_;       // diagonal entries
  Eigen::VectorXd diag_sqrt_;  // their square roots
  Eigen::MatrixXd dense_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Draw from N(0, M/beta).
Eigen::VectorXd mass_sample(RngStream& rng, const MassSpec& mass, double beta, Eigen::Index d);

struct SamplerConfig {
  double h = 0.1;        // stepsize
  double gamma = 1.0;    // friction
  double beta = 1.0;     // inverse temperature
  MassSpec mass;         // identity by default
  int batch_size = 1;    // minibatch size n, 1 <= n <= N
  std::uint64_t seed = 0;
  int thin = 1;          // trajectory thinning stride

  // Covariance-tracker knobs for minibatch methods.
  double cov_decay = 0.9;
  int cov_rank_cap = 32;

  // Draw a fresh injected-noise vector for the second half kick instead of
  // reusing the first one. Off by default: the listing reuses one draw.
  bool fresh_second_noise = false;

  double lambda2() const;  // tanh(gamma h / 2)
  void validate() const;   // throws config_error
};

// Thinned chain of positions with epoch accounting.
//
// Gradient-term evaluations are counted as exact integers; epochs() divides
// by the dataset size only on read, so cost bookkeeping never drifts.
class Trajectory {
 public:
  Trajectory(int stride, std::int64_t dataset_size);

  // One sampler step: `cost` gradient-term evaluations, optional per-step
  // scalar diagnostic (kept only for recorded samples).
  void append(const Eigen::VectorXd& theta, std::uint64_t cost,
              double diagnostic = std::numeric_limits<double>::quiet_NaN());

  const std::vector<Eigen::VectorXd>& samples() const { return samples_; }
  const std::vector<double>& sample_epochs() const { return sample_epochs_; }
  const std::vector<double>& diagnostics() const { return diagnostics_; }

  std::uint64_t steps_taken() const { return steps_; }
  std::uint64_t grad_evals() const { return evals_; }
  double epochs() const { return static_cast<double>(evals_) / static_cast<double>(n_data_); }
  int stride() const { return stride_; }

 private:
  int stride_;
  std::int64_t n_data_;
  std::uint64_t steps_ = 0;
  std::uint64_t evals_ = 0;
  std::vector<Eigen::VectorXd> samples_;
  std::vector<double> sample_epochs_;
  std::vector<double> diagnostics_;
};

}  // namespace nogin
