/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/core.hpp"

#include <cmath>

#include "nogin/errors.hpp"

namespace nogin {

MassSpec MassSpec::diagonal(const Eigen::VectorXd& entries) {
  if (entries.size() == 0) throw config_error("diagonal mass must be non-empty");
  if ((entries.array() <= 0.0).any())
    throw config_error("diagonal mass entries must be strictly positive");
  MassSpec m;
  m.kind_ = Kind::diagonal;
  m.diag_ = entries;
  m.diag_sqrt_ = entries.array().sqrt();
  return m;
}

MassSpec MassSpec::dense(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols() || mat.rows() == 0)
    throw config_error("dense mass must be square and non-empty");
  if (!mat.isApprox(mat.transpose(), 1e-12)) throw config_error("dense mass must be symmetric");
  MassSpec m;
  m.kind_ = Kind::dense;
  m.dense_ = 0.5 * (mat + mat.transpose());
  m.llt_.compute(m.dense_);
  if (m.llt_.info() != Eigen::Success)
    throw config_error("dense mass must be positive definite (Cholesky failed)");
  return m;
}

Eigen::Index MassSpec::dim() const {
  switch (kind_) {
    case Kind::identity: return -1;
    case Kind::diagonal: return diag_.size();
    case Kind::dense: return dense_.rows();
  }
  return -1;
}

bool MassSpec::is_isotropic() const {
  switch (kind_) {
    case Kind::identity: return true;
    case Kind::diagonal: return (diag_.array() == diag_[0]).all();
    case Kind::dense: return false;
  }
  return false;
}

double MassSpec::iso_value() const {
  return kind_ == Kind::diagonal ? diag_[0] : 1.0;
}

Eigen::VectorXd MassSpec::apply(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::identity: return v;
    case Kind::diagonal: return diag_.cwiseProduct(v);
    case Kind::dense: return dense_ * v;
  }
  return v;
}

Eigen::VectorXd MassSpec::apply_inv(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::identity: return v;
    case Kind::diagonal: return v.cwiseQuotient(diag_);
    case Kind::dense: return llt_.solve(v);
  }
  return v;
}

Eigen::VectorXd MassSpec::chol_mul(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::identity: return v;
    case Kind::diagonal: return diag_sqrt_.cwiseProduct(v);
    case Kind::dense: return llt_.matrixL() * v;
  }
  return v;
}

Eigen::VectorXd MassSpec::chol_solve(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::identity: return v;
    case Kind::diagonal: return v.cwiseQuotient(diag_sqrt_);
    case Kind::dense: return llt_.matrixL().solve(v);
  }
  return v;
}

Eigen::VectorXd MassSpec::cholT_solve(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::identity: return v;
    case Kind::diagonal: return v.cwiseQuotient(diag_sqrt_);
    case Kind::dense: return llt_.matrixU().solve(v);
  }
  return v;
}

Eigen::MatrixXd MassSpec::chol_matrix(Eigen::Index d) const {
  switch (kind_) {
    case Kind::identity: return Eigen::MatrixXd::Identity(d, d);
    case Kind::diagonal: return diag_sqrt_.asDiagonal();
    case Kind::dense: return llt_.matrixL();
  }
  return Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd mass_sample(RngStream& rng, const MassSpec& mass, double beta, Eigen::Index d) {
  if (beta <= 0.0) throw config_error("beta must be strictly positive");
  if (mass.dim() >= 0 && mass.dim() != d) throw config_error("mass dimension mismatch");
  Eigen::VectorXd z = rng.normal_vector(d);
  if (mass.is_identity() && beta == 1.0) return z;
  return mass.chol_mul(z) / std::sqrt(beta);
}

double SamplerConfig::lambda2() const { return std::tanh(gamma * h / 2.0); }

void SamplerConfig::validate() const {
  if (!(h > 0.0)) throw config_error("stepsize h must be strictly positive");
  if (!(gamma > 0.0)) throw config_error("friction gamma must be strictly positive");
  if (!(beta > 0.0)) throw config_error("inverse temperature beta must be strictly positive");
  if (batch_size < 1) throw config_error("batch size must be >= 1");
  if (thin < 1) throw config_error("thinning stride must be >= 1");
  if (!(cov_decay > 0.0) || cov_decay > 1.0) throw config_error("cov_decay must lie in (0, 1]");
  if (cov_rank_cap < 1) throw config_error("cov_rank_cap must be >= 1");
}

Trajectory::Trajectory(int stride, std::int64_t dataset_size)
    : stride_(stride), n_data_(dataset_size) {
  if (stride < 1) throw config_error("trajectory stride must be >= 1");
  if (dataset_size < 1) throw config_error("trajectory dataset size must be >= 1");
}

void Trajectory::append(const Eigen::VectorXd& theta, std::uint64_t cost, double diagnostic) {
  ++steps_;
  evals_ += cost;
  if (steps_ % static_cast<std::uint64_t>(stride_) == 0) {
    samples_.push_back(theta);
    sample_epochs_.push_back(epochs());
    diagnostics_.push_back(diagnostic);
  }
}

}  // namespace nogin
