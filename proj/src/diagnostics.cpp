/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/diagnostics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "nogin/errors.hpp"

namespace nogin {

IatResult estimate_iat(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 100) throw config_error("estimate_iat: series must have length >= 100");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  // Autocovariance by FFT with zero padding to avoid circular wrap.
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<std::complex<double>> buf(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = series[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq(m);
  fft.fwd(freq, buf);
  for (auto& f : freq) f = f * std::conj(f);
  fft.inv(buf, freq);

  const double var = buf[0].real() / static_cast<double>(n);
  if (!(var > 0.0) || !std::isfinite(var))
    throw numeric_error("estimate_iat: series variance is zero (constant input)", var);

  IatResult out;
  const std::size_t max_lag = n / 2;
  out.acf.resize(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k)
    out.acf[k] = buf[k].real() / buf[0].real();
  out.acf[0] = 1.0;

  // Self-consistent truncation: smallest W with W >= 5 * tau(W).
  double tau = 1.0;
  std::size_t window = max_lag;
  for (std::size_t w = 1; w <= max_lag; ++w) {
    tau += 2.0 * out.acf[w];
    if (static_cast<double>(w) >= 5.0 * tau) {
      window = w;
      break;
    }
  }
  out.tau = tau;
  out.window = static_cast<int>(window);
  return out;
}

namespace {

// Deterministic half of one integrator step on F = -theta with a fixed scalar
// damping factor; used to read off the propagation matrix column by column.
Eigen::Vector2d compose_step(double h, double damping, const Eigen::Vector2d& z) {
  double theta = z[0], p = z[1];
  theta += 0.5 * h * p;
  const double force = -theta;
  p += 0.5 * h * force;
  p *= damping;
  p += 0.5 * h * force;
  theta += 0.5 * h * p;
  return {theta, p};
}

}  // namespace

double closed_form_tau(double h, double sigma2) {
  // tau = (1+lambda)/(1-lambda) for the dominant eigenvalue of the composed
  // map with damping (1-u)/(1+u), u = h^2 sigma2/4, reduced to radicals. The
  // discriminant is h^2 (sigma2^2 + 4) - 16; complex below that.
  const double c4 = sigma2 * sigma2;
  const double disc = h * h * (c4 + 4.0) - 16.0;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double root = h * std::sqrt(disc);
  return (8.0 + (sigma2 - 2.0) * h * h + root) / ((sigma2 + 2.0) * h * h - root);
}

LinearGaussianOracle oracle_tau(double h, double gamma, double sigma2) {
  if (!(h > 0.0)) throw config_error("oracle_tau: h must be > 0");
  if (gamma < 0.0 || sigma2 < 0.0) throw config_error("oracle_tau: gamma, sigma2 must be >= 0");

  LinearGaussianOracle out;
  out.h = h;
  out.gamma = gamma;
  out.sigma2 = sigma2;

  const double u = std::tanh(gamma * h / 2.0) + h * h * sigma2 / 4.0;
  const double damping = (1.0 - u) / (1.0 + u);
  const Eigen::Vector2d col0 = compose_step(h, damping, {1.0, 0.0});
  const Eigen::Vector2d col1 = compose_step(h, damping, {0.0, 1.0});
  out.propagation.col(0) = col0;
  out.propagation.col(1) = col1;

  const double tr = out.propagation.trace();
  const double det = out.propagation.determinant();
  const double disc = tr * tr - 4.0 * det;
  out.closed_form = closed_form_tau(h, sigma2);
  if (disc < 0.0) {
    out.oscillatory = true;
    out.tau = std::numeric_limits<double>::quiet_NaN();
    out.lambda_max = std::numeric_limits<double>::quiet_NaN();
    out.slow_direction.setZero();
    return out;
  }
  out.lambda_max = (tr + std::sqrt(disc)) / 2.0;
  out.tau = (1.0 + out.lambda_max) / (1.0 - out.lambda_max);

  // Eigenvector of A^T for lambda_max: (A^T - lambda I) v = 0.
  const Eigen::Matrix2d at = out.propagation.transpose();
  Eigen::Matrix2d shifted = at - out.lambda_max * Eigen::Matrix2d::Identity();
  // Pick the larger row to avoid cancellation.
  Eigen::Vector2d v;
  if (std::abs(shifted(0, 0)) + std::abs(shifted(0, 1)) >
      std::abs(shifted(1, 0)) + std::abs(shifted(1, 1)))
    v = {-shifted(0, 1), shifted(0, 0)};
  else
    v = {-shifted(1, 1), shifted(1, 0)};
  out.slow_direction = v.normalized();

  // The radical form must reproduce the numerical eigenvalue whenever the
  // injected-noise term vanishes.
  if (gamma == 0.0 && std::isfinite(out.closed_form)) {
    const double rel = std::abs(out.tau / out.closed_form - 1.0);
    if (!(rel <= 1e-6))
      throw numeric_error("oracle_tau: closed form disagrees with eigenvalue route", rel);
  }
  return out;
}

Observable observable_from_string(const std::string& name) {
  if (name == "variance") return Observable::variance;
  if (name == "mean") return Observable::mean;
  throw config_error("unknown observable: " + name);
}

std::string observable_name(Observable o) {
  return o == Observable::variance ? "variance" : "mean";
}

std::vector<CurvePoint> observable_curve(const Trajectory& trajectory,
                                         const ReferenceMoments& reference, Observable observable,
                                         const std::vector<double>& checkpoints) {
  const auto& samples = trajectory.samples();
  const auto& epochs = trajectory.sample_epochs();
  std::vector<CurvePoint> out;
  if (samples.empty() || checkpoints.empty()) return out;

  const Eigen::Index d = samples.front().size();
  const Eigen::VectorXd& ref = observable == Observable::variance
                                   ? reference.variance
                                   : reference.mean;
  if (ref.size() != d) throw config_error("observable_curve: reference dimension mismatch");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(d);
  std::size_t i = 0;
  double count = 0.0;
  const double covered = trajectory.epochs();
  for (double cp : checkpoints) {
    if (cp > covered) break;
    while (i < samples.size() && epochs[i] <= cp) {
      count += 1.0;
      const Eigen::VectorXd delta = samples[i] - mean;
      mean += delta / count;
      m2 += delta.cwiseProduct(samples[i] - mean);
      ++i;
    }
    const double needed = observable == Observable::variance ? 2.0 : 1.0;
    if (count >= needed) {
      Eigen::VectorXd obs = observable == Observable::variance
                                ? Eigen::VectorXd(m2 / (count - 1.0))
                                : mean;
      out.push_back({cp, obs.mean(), (obs - ref).squaredNorm() / static_cast<double>(d)});
    }
  }
  return out;
}

std::vector<std::pair<double, double>> mse_curve(const Trajectory& trajectory,
                                                 const ReferenceMoments& reference,
                                                 Observable observable,
                                                 const std::vector<double>& checkpoints) {
  std::vector<std::pair<double, double>> out;
  for (const CurvePoint& p : observable_curve(trajectory, reference, observable, checkpoints))
    out.emplace_back(p.epoch, p.mse);
  return out;
}

std::vector<double> epoch_checkpoints(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo)) throw config_error("epoch_checkpoints: need 0 < lo < hi");
  if (per_decade < 1) throw config_error("epoch_checkpoints: per_decade must be >= 1");
  const double decades = std::log10(hi / lo);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> cps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    cps[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  cps.back() = hi;
  return cps;
}

}  // namespace nogin
