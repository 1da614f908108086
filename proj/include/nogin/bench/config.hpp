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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nogin/models.hpp"
#include "nogin/samplers.hpp"

namespace nogin::bench {

// Experiment description: model, method list, (h, n) grid, budgets, seeds.
// Parses from / serializes to a line-oriented `key = value` file; the
// serialized form is fully explicit and round-trips losslessly.
struct ExperimentConfig {
  // model
  std::string model_kind = "gaussian";  // gaussian | mixture | blr

  // gaussian-model parameters
  int gaussian_dim = 1;
  std::int64_t gaussian_data_size = 1000;
  std::vector<double> gaussian_eta = {0.0};         // scalar broadcasts to D
  std::vector<double> gaussian_omega_diag = {1.0};  // scalar broadcasts to D
  double gaussian_noise_sigma2 = 0.0;

  // mixture-model parameters
  std::int64_t mixture_data_size = 1000;
  std::vector<double> mixture_theta_star = {0.5, 0.0};
  std::uint64_t mixture_data_seed = 1;

  // blr-model parameters
  std::int64_t blr_data_size = 2000;
  int blr_dim = 16;
  std::vector<double> blr_theta_star;  // empty: default deterministic pattern
  std::uint64_t blr_data_seed = 3;
  std::string blr_csv;  // when set, loads data instead of generating

  // sweep grid
  std::vector<std::string> methods = {"nogin"};
  std::vector<double> stepsizes = {0.1};
  std::vector<int> batch_sizes = {100};
  std::map<std::string, double> step_multiplier;  // per-method h multiplier
  int chains = 4;
  double epochs = 100.0;
  double gamma = 1.0;
  double beta = 1.0;
  int thin = 1;
  std::string observable = "variance";
  int checkpoints_per_decade = 32;
  double cov_decay = 0.9;
  int cov_rank_cap = 32;

  // reference run
  std::uint64_t reference_samples = 1000000;
  std::uint64_t reference_burnin = 10000;
  double reference_h = 0.1;
  std::uint64_t reference_seed = 7;

  // execution
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir = "out";

  void validate() const;            // throws config_error
  std::string serialize() const;    // canonical text form
  double multiplier_for(const std::string& method) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

// Named presets: "gmix-paper", "blr-desk", "blr-mnist".
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Instantiate the configured model (generates/loads data deterministically).
std::unique_ptr<TargetModel> build_model(const ExperimentConfig& cfg);

// Model with the synthetic gaussian noise overridden (IAT experiments).
std::unique_ptr<TargetModel> build_gaussian_model(const ExperimentConfig& cfg, double noise_sigma2);

}  // namespace nogin::bench
