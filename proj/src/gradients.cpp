/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/gradients.hpp"

#include <cmath>

#include "nogin/errors.hpp"

namespace nogin {

Eigen::VectorXd true_force(const TargetModel& model, const Eigen::VectorXd& theta) {
  Eigen::VectorXd f = model.prior_grad(theta) + model.data_grad_sum(theta);
  if (!f.allFinite()) throw numeric_error("true_force: non-finite gradient");
  return f;
}

CovarianceTracker::CovarianceTracker(Eigen::Index dim, double decay, int rank_cap)
    : dim_(dim), decay_(decay), rank_cap_(rank_cap) {
  if (dim < 1) throw config_error("tracker dimension must be >= 1");
  if (!(decay > 0.0) || decay > 1.0) throw config_error("tracker decay must lie in (0, 1]");
  if (rank_cap < 1) throw config_error("tracker rank cap must be >= 1");
}

void CovarianceTracker::reset() {
  cols_.clear();
  col_batch_.clear();
  batches_.clear();
  first_batch_id_ = 0;
}

LowRankPSD CovarianceTracker::update(const Eigen::MatrixXd& centered, double scale) {
  for (auto& b : batches_) b.age_weight *= decay_;
  if (centered.cols() > 0 && scale > 0.0) {
    if (centered.rows() != dim_) throw config_error("tracker: column dimension mismatch");
    batches_.push_back({1.0, scale, static_cast<int>(centered.cols())});
    const std::size_t id = first_batch_id_ + batches_.size() - 1;
    for (Eigen::Index j = 0; j < centered.cols(); ++j) {
      cols_.push_back(centered.col(j));
      col_batch_.push_back(id);
    }
    while (static_cast<int>(cols_.size()) > rank_cap_) {
      const std::size_t owner = col_batch_.front();
      cols_.pop_front();
      col_batch_.pop_front();
      Batch& b = batches_[owner - first_batch_id_];
      if (--b.columns_left == 0 && owner == first_batch_id_) {
        batches_.pop_front();
        ++first_batch_id_;
      }
    }
    // Leading batches may have been fully evicted out of order.
    while (!batches_.empty() && batches_.front().columns_left == 0) {
      batches_.pop_front();
      ++first_batch_id_;
    }
  }
  return current();
}

LowRankPSD CovarianceTracker::current() const {
  if (cols_.empty()) return LowRankPSD::zero(dim_);
  double denom = 0.0;
  for (const auto& b : batches_)
    if (b.columns_left > 0) denom += b.age_weight;
  Eigen::MatrixXd weighted(dim_, static_cast<Eigen::Index>(cols_.size()));
  for (std::size_t j = 0; j < cols_.size(); ++j) {
    const Batch& b = batches_[col_batch_[j] - first_batch_id_];
    weighted.col(static_cast<Eigen::Index>(j)) =
        std::sqrt(b.age_weight * b.scale / denom) * cols_[j];
  }
  return LowRankPSD(0.0, 1.0, std::move(weighted));
}

NoisyForce minibatch_force(const TargetModel& model, const Eigen::VectorXd& theta, std::int64_t n,
                           RngStream& rng, CovarianceTracker& tracker) {
  const std::int64_t n_data = model.data_size();
  if (n < 1 || n > n_data) throw config_error("minibatch size must satisfy 1 <= n <= N");

  if (const LowRankPSD* sigma = model.synthetic_noise()) {
    NoisyForce out;
    out.value = true_force(model, theta);
    if (!sigma->is_zero()) out.value += sigma->sample_gaussian(rng, 0.0, 1.0);
    out.covariance = *sigma;
    return out;
  }

  if (n == n_data) {
    NoisyForce out;
    out.value = true_force(model, theta);
    out.covariance = LowRankPSD::zero(model.dim());
    return out;
  }

  NoisyForce out;
  out.batch.resize(static_cast<std::size_t>(n));
  // Partial Fisher-Yates over [0, N).
  static thread_local std::vector<std::int64_t> pool;
  pool.resize(static_cast<std::size_t>(n_data));
  for (std::int64_t i = 0; i < n_data; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_data - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    out.batch[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd cols;
  model.datum_grads(out.batch, theta, cols);
  out.value = model.prior_grad(theta) +
              (static_cast<double>(n_data) / static_cast<double>(n)) * cols.rowwise().sum();
  if (!out.value.allFinite()) throw numeric_error("minibatch_force: non-finite gradient");

  if (n == 1) {
    out.covariance = tracker.update(Eigen::MatrixXd(model.dim(), 0), 0.0);
    return out;
  }
  const Eigen::VectorXd mean = cols.rowwise().mean();
  cols.colwise() -= mean;
  const double nn = static_cast<double>(n);
  const double scale =
      static_cast<double>(n_data) * static_cast<double>(n_data - n) / (nn * (nn - 1.0));
  out.covariance = tracker.update(cols, scale);
  return out;
}

}  // namespace nogin
