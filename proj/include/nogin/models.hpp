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
#include <string>
#include <vector>

#include "nogin/lowrank.hpp"
#include "nogin/rng.hpp"

namespace nogin {

// Target posterior over a dataset of N records: per-datum log-likelihood
// gradients plus a prior gradient. The full force is their sum; models supply
// gradients analytically. Immutable after construction, shared across chains.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::int64_t data_size() const = 0;

  virtual Eigen::VectorXd prior_grad(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::VectorXd datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const = 0;

  // Per-datum gradients for a batch of indices, one column each. The default
  // loops datum_grad; models override when a vectorized form exists.
  virtual void datum_grads(const std::vector<std::int64_t>& idx, const Eigen::VectorXd& theta,
                           Eigen::MatrixXd& out) const;

  // Sum of all per-datum gradients (no prior). Default loops the dataset.
  virtual Eigen::VectorXd data_grad_sum(const Eigen::VectorXd& theta) const;

  virtual bool has_log_density() const { return false; }
  virtual double log_density(const Eigen::VectorXd& theta) const;

  // Non-null when the model generates gradient noise synthetically: the force
  // estimator returns true force + N(0, S) and passes S through verbatim.
  virtual const LowRankPSD* synthetic_noise() const { return nullptr; }

  // Canonical description string; the reference cache is keyed by its hash.
  virtual std::string describe() const = 0;
};

// FNV-1a hash of the canonical model description (hex string, 16 chars).
std::string model_hash(const TargetModel& model);

// Linear-Gaussian target N(eta, Omega) with synthetic N(0, S) gradient noise.
// F(theta) = -Omega^{-1} (theta - eta). The dataset size is notional and only
// feeds epoch accounting.
class GaussianSyntheticModel : public TargetModel {
 public:
  GaussianSyntheticModel(Eigen::VectorXd eta, Eigen::MatrixXd omega, LowRankPSD noise,
                         std::int64_t n_data = 1000);

  Eigen::Index dim() const override { return eta_.size(); }
  std::int64_t data_size() const override { return n_data_; }
  Eigen::VectorXd prior_grad(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd data_grad_sum(const Eigen::VectorXd& theta) const override;
  bool has_log_density() const override { return true; }
  double log_density(const Eigen::VectorXd& theta) const override;
  const LowRankPSD* synthetic_noise() const override { return &noise_; }
  std::string describe() const override;

  const Eigen::VectorXd& eta() const { return eta_; }
  const Eigen::MatrixXd& omega() const { return omega_; }

 private:
  Eigen::VectorXd eta_;
  Eigen::MatrixXd omega_;
  Eigen::LLT<Eigen::MatrixXd> omega_llt_;
  LowRankPSD noise_;
  std::int64_t n_data_;
};

// Two-center Gaussian mixture posterior over theta = [mu1, mu2] with
// per-datum likelihood proportional to exp(-(y-mu1)^2/2) + 2 exp(-(y-mu2)^2/2)
// and a flat prior. The normalization is theta-independent, so the gradient
// of the unnormalized form is exact.
class MixtureModel : public TargetModel {
 public:
  explicit MixtureModel(Eigen::VectorXd data);

  Eigen::Index dim() const override { return 2; }
  std::int64_t data_size() const override { return data_.size(); }
  Eigen::VectorXd prior_grad(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const override;
  bool has_log_density() const override { return true; }
  double log_density(const Eigen::VectorXd& theta) const override;
  std::string describe() const override;

  const Eigen::VectorXd& data() const { return data_; }

 private:
  Eigen::VectorXd data_;
};

// Bayesian logistic regression: features X (constant column included), binary
// labels, prior N(0, 100 I). Per-datum gradient (c_i - s(theta.x_i)) x_i.
class BlrModel : public TargetModel {
 public:
  BlrModel(Eigen::MatrixXd features, Eigen::VectorXi labels);

  Eigen::Index dim() const override { return features_.cols(); }
  std::int64_t data_size() const override { return features_.rows(); }
  Eigen::VectorXd prior_grad(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const override;
  void datum_grads(const std::vector<std::int64_t>& idx, const Eigen::VectorXd& theta,
                   Eigen::MatrixXd& out) const override;
  Eigen::VectorXd data_grad_sum(const Eigen::VectorXd& theta) const override;
  bool has_log_density() const override { return true; }
  double log_density(const Eigen::VectorXd& theta) const override;
  std::string describe() const override;

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXi& labels() const { return labels_; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXi labels_;
};

// Draw N datapoints from the mixture density at theta_star: component picked
// with weight 1:2, then a unit-variance Gaussian around its center.
Eigen::VectorXd generate_mixture_data(RngStream& rng, std::int64_t n,
                                      const Eigen::VectorXd& theta_star);

// Synthetic logistic-regression data: Gaussian feature rows plus a trailing
// constant column, labels Bernoulli(s(theta_star . x)). theta_star has length
// d (constant-term coefficient last).
struct BlrData {
  Eigen::MatrixXd features;  // n x d, last column all ones
  Eigen::VectorXi labels;
};
BlrData generate_blr_data(RngStream& rng, std::int64_t n, Eigen::Index d,
                          const Eigen::VectorXd& theta_star);

// CSV ingestion: one row per record, real feature columns, last column a 0/1
// label. A constant column is appended to the features.
BlrData csv_load_blr(const std::string& path);

// Writes the matching CSV (drops the trailing constant column).
void csv_write_blr(const std::string& path, const BlrData& data);

}  // namespace nogin
