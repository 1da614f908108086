/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/models.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nogin/errors.hpp"

namespace nogin {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_vector(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(v[i]);
  }
  return s + "]";
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void TargetModel::datum_grads(const std::vector<std::int64_t>& idx, const Eigen::VectorXd& theta,
                              Eigen::MatrixXd& out) const {
  out.resize(dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = datum_grad(idx[k], theta);
}

Eigen::VectorXd TargetModel::data_grad_sum(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim());
  for (std::int64_t i = 0; i < data_size(); ++i) sum += datum_grad(i, theta);
  return sum;
}

double TargetModel::log_density(const Eigen::VectorXd&) const {
  throw config_error("model does not provide a log-density");
}

std::string model_hash(const TargetModel& model) {
  const std::string desc = model.describe();
  const std::uint64_t h = fnv1a(desc.data(), desc.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

// ---------------------------------------------------------------------------
// GaussianSyntheticModel

GaussianSyntheticModel::GaussianSyntheticModel(Eigen::VectorXd eta, Eigen::MatrixXd omega,
                                               LowRankPSD noise, std::int64_t n_data)
    : eta_(std::move(eta)), omega_(std::move(omega)), noise_(std::move(noise)), n_data_(n_data) {
  if (omega_.rows() != eta_.size() || omega_.cols() != eta_.size())
    throw config_error("gaussian model: omega must be D x D");
  if (noise_.dim() != eta_.size()) throw config_error("gaussian model: noise dimension mismatch");
  if (n_data_ < 1) throw config_error("gaussian model: data size must be >= 1");
  omega_llt_.compute(omega_);
  if (omega_llt_.info() != Eigen::Success)
    throw config_error("gaussian model: omega must be positive definite");
}

Eigen::VectorXd GaussianSyntheticModel::prior_grad(const Eigen::VectorXd& theta) const {
  return Eigen::VectorXd::Zero(theta.size());
}

Eigen::VectorXd GaussianSyntheticModel::datum_grad(std::int64_t, const Eigen::VectorXd& theta) const {
  return data_grad_sum(theta) / static_cast<double>(n_data_);
}

Eigen::VectorXd GaussianSyntheticModel::data_grad_sum(const Eigen::VectorXd& theta) const {
  return -omega_llt_.solve(theta - eta_);
}

double GaussianSyntheticModel::log_density(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd d = theta - eta_;
  return -0.5 * d.dot(omega_llt_.solve(d));
}

std::string GaussianSyntheticModel::describe() const {
  std::string s = "gaussian{N=" + std::to_string(n_data_) + ",eta=" + fmt_vector(eta_) + ",omega=[";
  for (Eigen::Index i = 0; i < omega_.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(omega_.data()[i]);
  }
  s += "],noise{alpha=" + fmt_double(noise_.alpha()) + ",c=" + fmt_double(noise_.scale()) + ",cols=[";
  for (Eigen::Index i = 0; i < noise_.columns().size(); ++i) {
    if (i) s += ",";
    s += fmt_double(noise_.columns().data()[i]);
  }
  return s + "]}}";
}

// ---------------------------------------------------------------------------
// MixtureModel

MixtureModel::MixtureModel(Eigen::VectorXd data) : data_(std::move(data)) {
  if (data_.size() < 1) throw config_error("mixture model: empty dataset");
}

Eigen::VectorXd MixtureModel::prior_grad(const Eigen::VectorXd& theta) const {
  return Eigen::VectorXd::Zero(theta.size());
}

Eigen::VectorXd MixtureModel::datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const {
  const double y = data_[i];
  const double d1 = y - theta[0];
  const double d2 = y - theta[1];
  const double a = std::exp(-0.5 * d1 * d1);
  const double b = 2.0 * std::exp(-0.5 * d2 * d2);
  const double s = a + b;
  Eigen::VectorXd g(2);
  g << a * d1 / s, b * d2 / s;
  return g;
}

double MixtureModel::log_density(const Eigen::VectorXd& theta) const {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const double d1 = data_[i] - theta[0];
    const double d2 = data_[i] - theta[1];
    lp += std::log(std::exp(-0.5 * d1 * d1) + 2.0 * std::exp(-0.5 * d2 * d2));
  }
  return lp;
}

std::string MixtureModel::describe() const {
  std::uint64_t h = fnv1a(data_.data(), sizeof(double) * static_cast<std::size_t>(data_.size()));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return "mixture{N=" + std::to_string(data_.size()) + ",data_fnv=" + buf + "}";
}

// ---------------------------------------------------------------------------
// BlrModel

BlrModel::BlrModel(Eigen::MatrixXd features, Eigen::VectorXi labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size())
    throw config_error("blr model: feature/label row count mismatch");
  if (features_.rows() < 1 || features_.cols() < 1) throw config_error("blr model: empty dataset");
  for (Eigen::Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 0 && labels_[i] != 1) throw config_error("blr model: labels must be 0/1");
}

Eigen::VectorXd BlrModel::prior_grad(const Eigen::VectorXd& theta) const {
  return -theta / 100.0;
}

Eigen::VectorXd BlrModel::datum_grad(std::int64_t i, const Eigen::VectorXd& theta) const {
  const double s = logistic(features_.row(i).dot(theta));
  return (static_cast<double>(labels_[i]) - s) * features_.row(i).transpose();
}

void BlrModel::datum_grads(const std::vector<std::int64_t>& idx, const Eigen::VectorXd& theta,
                           Eigen::MatrixXd& out) const {
  const Eigen::Index nb = static_cast<Eigen::Index>(idx.size());
  out.resize(dim(), nb);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const Eigen::Index i = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(k)]);
    const double s = logistic(features_.row(i).dot(theta));
    out.col(k) = (static_cast<double>(labels_[i]) - s) * features_.row(i).transpose();
  }
}

Eigen::VectorXd BlrModel::data_grad_sum(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd margin = features_ * theta;
  Eigen::VectorXd resid(margin.size());
  for (Eigen::Index i = 0; i < margin.size(); ++i)
    resid[i] = static_cast<double>(labels_[i]) - logistic(margin[i]);
  return features_.transpose() * resid;
}

double BlrModel::log_density(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd margin = features_ * theta;
  double lp = -theta.squaredNorm() / 200.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    // log s(m) = -log(1+e^{-m}); log(1-s(m)) = -m - log(1+e^{-m})
    const double m = margin[i];
    const double log1pe = m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    lp += labels_[i] == 1 ? -log1pe : -m - log1pe;
  }
  return lp;
}

std::string BlrModel::describe() const {
  std::uint64_t h = fnv1a(features_.data(), sizeof(double) * static_cast<std::size_t>(features_.size()));
  h = fnv1a(labels_.data(), sizeof(int) * static_cast<std::size_t>(labels_.size()), h);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return "blr{N=" + std::to_string(features_.rows()) + ",D=" + std::to_string(features_.cols()) +
         ",data_fnv=" + buf + "}";
}

// ---------------------------------------------------------------------------
// Data generation and CSV ingestion

Eigen::VectorXd generate_mixture_data(RngStream& rng, std::int64_t n,
                                      const Eigen::VectorXd& theta_star) {
  if (n < 1) throw config_error("generate_mixture_data: n must be >= 1");
  if (theta_star.size() != 2) throw config_error("generate_mixture_data: theta_star must have length 2");
  Eigen::VectorXd y(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double center = rng.uniform() < 1.0 / 3.0 ? theta_star[0] : theta_star[1];
    y[i] = center + rng.normal();
  }
  return y;
}

BlrData generate_blr_data(RngStream& rng, std::int64_t n, Eigen::Index d,
                          const Eigen::VectorXd& theta_star) {
  if (n < 1) throw config_error("generate_blr_data: n must be >= 1");
  if (d < 2) throw config_error("generate_blr_data: d must be >= 2 (constant column included)");
  if (theta_star.size() != d) throw config_error("generate_blr_data: theta_star must have length d");
  BlrData out;
  out.features.resize(n, d);
  out.labels.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j + 1 < d; ++j) out.features(i, j) = rng.normal();
    out.features(i, d - 1) = 1.0;
    const double s = logistic(out.features.row(i).dot(theta_star));
    out.labels[i] = rng.uniform() < s ? 1 : 0;
  }
  return out;
}

BlrData csv_load_blr(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw parse_error("not a number: '" + tok + "'", lineno);
      }
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw parse_error("trailing junk in field: '" + tok + "'", lineno);
      fields.push_back(v);
    }
    if (fields.size() < 2) throw parse_error("need at least one feature and a label", lineno);
    if (width < 0) width = static_cast<Eigen::Index>(fields.size());
    if (static_cast<Eigen::Index>(fields.size()) != width)
      throw parse_error("inconsistent column count", lineno);
    const double lab = fields.back();
    if (lab != 0.0 && lab != 1.0)
      throw parse_error("label must be 0 or 1, got '" + std::to_string(lab) + "'", lineno);
    fields.pop_back();
    rows.push_back(std::move(fields));
    labels.push_back(static_cast<int>(lab));
  }
  if (rows.empty()) throw parse_error("empty CSV file: " + path);
  BlrData out;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = width - 1;
  out.features.resize(n, d + 1);
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.features(i, d) = 1.0;
    out.labels[i] = labels[static_cast<std::size_t>(i)];
  }
  return out;
}

void csv_write_blr(const std::string& path, const BlrData& data) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open CSV file for writing: " + path);
  char buf[40];
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Eigen::Index j = 0; j + 1 < data.features.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
      out << buf << ',';
    }
    out << data.labels[i] << '\n';
  }
}

}  // namespace nogin
