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
#include <utility>
#include <vector>

#include "nogin/core.hpp"

namespace nogin {

// Autocorrelation analysis of a scalar chain.
struct IatResult {
  std::vector<double> acf;  // acf[0] = 1
  double tau = 1.0;         // integrated autocorrelation time
  int window = 0;           // truncation lag used
};

// ACF via FFT, tau = 1 + 2 sum_{k<=W} acf(k) with the self-consistent window
// (smallest W with W >= 5 tau(W)). Throws numeric_error for a constant series,
// config_error for series shorter than 100.
IatResult estimate_iat(const std::vector<double>& series);

// One-step propagation analysis of the noisy-gradient integrator on the 1-D
// standard normal with constant gradient-noise variance sigma2. The 2x2
// matrix A is built by composing the drift/kick/damp maps numerically, never
// transcribed, with damping factor (1-u)/(1+u), u = tanh(gamma h/2) + h^2
// sigma2 / 4.
struct LinearGaussianOracle {
  double h = 0.0;
  double gamma = 0.0;
  double sigma2 = 0.0;
  Eigen::Matrix2d propagation;  // A
  bool oscillatory = false;     // complex dominant eigenvalues
  double lambda_max = 0.0;      // dominant eigenvalue (real case)
  Eigen::Vector2d slow_direction;  // matching eigenvector of A^T, unit norm
  double tau = 0.0;                // (1 + lambda)/(1 - lambda)
  // Closed-form tau for the gamma = 0 damping substitution; NaN outside the
  // real-eigenvalue regime. Cross-checked against the numerical eigenvalue to
  // 1e-6 relative whenever gamma = 0 and both are defined.
  double closed_form = 0.0;
};

LinearGaussianOracle oracle_tau(double h, double gamma, double sigma2);

// Closed-form tau for damping (1-u)/(1+u) with u = h^2 sigma2 / 4 (no
// injected-noise term). NaN when the eigenvalues are complex.
double closed_form_tau(double h, double sigma2);

// Reference moments produced by a long unbiased run; cached on disk keyed by
// the model hash.
struct ReferenceMoments {
  std::string model_hash;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = 1.0;
  bool acceptance_warning = false;
};

enum class Observable { variance, mean };

Observable observable_from_string(const std::string& name);
std::string observable_name(Observable o);

// One point of a running-observable curve: the componentwise mean of the
// running observable and its componentwise-averaged squared error against the
// reference.
struct CurvePoint {
  double epoch;
  double value;
  double mse;
};

// Running-average observable against the reference, emitted at the given
// epoch checkpoints (ascending). Stops at the end of the trajectory; empty
// when the trajectory ends before the first checkpoint.
std::vector<CurvePoint> observable_curve(const Trajectory& trajectory,
                                         const ReferenceMoments& reference, Observable observable,
                                         const std::vector<double>& checkpoints);

// The (epoch, mse) view of observable_curve.
std::vector<std::pair<double, double>> mse_curve(const Trajectory& trajectory,
                                                 const ReferenceMoments& reference,
                                                 Observable observable,
                                                 const std::vector<double>& checkpoints);

// Log-spaced epoch checkpoints covering [lo, hi] with at most per_decade
// points per decade (last point exactly hi).
std::vector<double> epoch_checkpoints(double lo, double hi, int per_decade = 32);

}  // namespace nogin
