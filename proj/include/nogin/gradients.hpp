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
#include <deque>
#include <vector>

#include "nogin/lowrank.hpp"
#include "nogin/models.hpp"
#include "nogin/rng.hpp"

namespace nogin {

// A force estimate together with its covariance in low-rank form.
struct NoisyForce {
  Eigen::VectorXd value;
  LowRankPSD covariance;
  std::vector<std::int64_t> batch;
};

// Exact gradient of the log posterior; costs one full pass (N evaluations).
Eigen::VectorXd true_force(const TargetModel& model, const Eigen::VectorXd& theta);

// Covariance estimate from a finite weighted history of centered per-datum
// force columns. Each update ages existing batches by `decay`, appends the
// new batch with its scale, and evicts oldest columns beyond `rank_cap`.
//
// The estimate is the weighted average of per-batch outer-product estimates:
//   S = sum_b decay^age_b * scale_b * C_b C_b^T / sum_b decay^age_b,
// so with decay = 1 and a single batch it reduces to that batch's scaled
// empirical covariance, and an update with no columns (n = 1 batches) leaves
// the estimate unchanged.
class CovarianceTracker {
 public:
  CovarianceTracker(Eigen::Index dim, double decay = 0.9, int rank_cap = 32);

  // `centered` holds columns with the batch mean already subtracted.
  // Returns the current estimate (alpha = 0 always).
  LowRankPSD update(const Eigen::MatrixXd& centered, double scale);

  LowRankPSD current() const;
  void reset();

  Eigen::Index dim() const { return dim_; }
  double decay() const { return decay_; }
  int rank_cap() const { return rank_cap_; }

 private:
  struct Batch {
    double age_weight;  // decay^age
    double scale;
    int columns_left;
  };

  Eigen::Index dim_;
  double decay_;
  int rank_cap_;
  std::deque<Eigen::VectorXd> cols_;  // oldest first
  std::deque<std::size_t> col_batch_;  // owning batch id per column
  std::deque<Batch> batches_;
  std::size_t first_batch_id_ = 0;
};

// Operation form of the tracker update.
inline LowRankPSD tracker_update(CovarianceTracker& tracker, const Eigen::MatrixXd& centered,
                                 double scale) {
  return tracker.update(centered, scale);
}

// Minibatch force estimate (uniform subsample of size n without replacement):
//   value = prior_grad + (N/n) sum_{i in batch} F_i(theta),
// covariance fed to `tracker` from the centered batch columns with scale
// N(N-n)/(n(n-1)). Special cases: n = N returns the exact force with an
// exactly zero covariance (no RNG consumed); n = 1 contributes no columns and
// falls back to the tracker history. Models with synthetic noise bypass the
// batch entirely: value = true force + draw, covariance passed through
// verbatim.
NoisyForce minibatch_force(const TargetModel& model, const Eigen::VectorXd& theta, std::int64_t n,
                           RngStream& rng, CovarianceTracker& tracker);

}  // namespace nogin
