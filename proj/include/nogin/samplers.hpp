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
#include <memory>
#include <string>

#include "nogin/core.hpp"
#include "nogin/gradients.hpp"
#include "nogin/lowrank.hpp"
#include "nogin/models.hpp"

namespace nogin {

// Drift: theta += t * M^{-1} p.
void phi_A(State& s, double t, const MassSpec& mass);

// Kick: p += t * force.
void phi_B(State& s, double t, const Eigen::VectorXd& force);

// Momentum damping p <- Dplus^{-1} Dminus p with
//   Dminus = (1 - lambda2) I - h^2 M Sigma / (4 beta),
//   Dplus  = (1 + lambda2) I + h^2 M Sigma / (4 beta).
// Realized through LowRankPSD solves; for non-isotropic mass the operator is
// conjugated by the mass Cholesky factor so the shifted solve stays symmetric.
// Construction verifies the contraction contract: every eigenvalue of
// Dplus^{-1} Dminus must lie strictly inside (-1, 1), else stability_error.
class DampingOperator {
 public:
  DampingOperator(const LowRankPSD& sigma, double lambda2, double h, double beta,
                  const MassSpec& mass);

  void apply_in_place(Eigen::VectorXd& p) const;

  // Contraction interval of the damping spectrum.
  double factor_min() const { return factor_min_; }
  double factor_max() const { return factor_max_; }

 private:
  enum class Path { scalar_sigma, isotropic, transformed, dense };

  Path path_;
  double lambda2_;
  double quarter_h2_;       // h^2 m /(4 beta) premultiplier on Sigma
  double scalar_factor_ = 1.0;  // Sigma = s*I fast path
  LowRankPSD sigma_;        // effective symmetric operator for low-rank paths
  const MassSpec* mass_ = nullptr;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_plus_;  // dense fallback
  Eigen::MatrixXd dense_minus_;
  double factor_min_ = 0.0;
  double factor_max_ = 0.0;
};

// Uniform stepping interface: one step advances the state and reports its
// cost in gradient-term evaluations. One instance per chain.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual std::uint64_t step(State& state, RngStream& rng) = 0;
  virtual std::string name() const = 0;
  virtual std::int64_t dataset_size() const = 0;
  // Per-step scalar diagnostic (MALA: 1/0 acceptance; NaN when none).
  virtual double last_diagnostic() const;
  std::uint64_t steps_done() const { return steps_done_; }

 protected:
  std::uint64_t steps_done_ = 0;
  void bump_and_check(const State& state);
};

enum class Method { nogin, aboba, sgld, msgld, sghmc, sgnht, ccadl, mala };

Method method_from_string(const std::string& name);
std::string method_name(Method m);
bool method_uses_minibatch(Method m);

std::unique_ptr<Sampler> make_sampler(Method method, const TargetModel& model,
                                      const SamplerConfig& cfg);

// Drive a sampler for `steps` steps, recording a thinned trajectory. A
// diverging chain is reported rather than thrown: `stable` is false and the
// trajectory holds the samples recorded before the failure.
struct ChainRun {
  Trajectory trajectory;
  bool stable = true;
  std::uint64_t divergence_step = 0;
  std::string failure;
};

ChainRun run_chain(Sampler& sampler, State state, RngStream& rng, std::uint64_t steps, int thin);

// Initial state: theta = theta0, p ~ N(0, M/beta).
State initial_state(const Eigen::VectorXd& theta0, const SamplerConfig& cfg, RngStream& rng);

}  // namespace nogin
