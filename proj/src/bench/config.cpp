/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/bench/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nogin/errors.hpp"

namespace nogin::bench {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s;
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s;
}

std::string fmt_list(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i];
  }
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw parse_error("expected a number, got '" + s + "'", line);
  }
  if (used != s.size()) throw parse_error("trailing junk after number: '" + s + "'", line);
  return v;
}

std::int64_t parse_int(const std::string& s, int line) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw parse_error("expected an integer, got '" + s + "'", line);
  }
  if (used != s.size()) throw parse_error("trailing junk after integer: '" + s + "'", line);
  return v;
}

std::uint64_t parse_u64(const std::string& s, int line) {
  std::size_t used = 0;
  unsigned long long v;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw parse_error("expected an unsigned integer, got '" + s + "'", line);
  }
  if (used != s.size()) throw parse_error("trailing junk after integer: '" + s + "'", line);
  return v;
}

std::vector<double> parse_double_list(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, line));
  if (out.empty()) throw parse_error("expected a non-empty list", line);
  return out;
}

}  // namespace

double ExperimentConfig::multiplier_for(const std::string& method) const {
  auto it = step_multiplier.find(method);
  return it == step_multiplier.end() ? 1.0 : it->second;
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds = {"gaussian", "mixture", "blr"};
  if (!kinds.count(model_kind)) throw config_error("unknown model kind: " + model_kind);
  if (methods.empty()) throw config_error("methods list is empty");
  for (const auto& m : methods) method_from_string(m);  // throws on unknown
  for (const auto& [m, mult] : step_multiplier) {
    method_from_string(m);
    if (!(mult > 0.0)) throw config_error("step multiplier must be positive for " + m);
  }
  if (stepsizes.empty()) throw config_error("stepsizes list is empty");
  for (double h : stepsizes)
    if (!(h > 0.0)) throw config_error("stepsizes must be positive");
  if (batch_sizes.empty()) throw config_error("batch_sizes list is empty");
  for (int n : batch_sizes)
    if (n < 1) throw config_error("batch sizes must be >= 1");
  if (chains < 1) throw config_error("chains must be >= 1");
  if (!(epochs > 0.0)) throw config_error("epochs budget must be positive");
  if (!(gamma > 0.0) || !(beta > 0.0)) throw config_error("gamma and beta must be positive");
  if (thin < 1) throw config_error("thin must be >= 1");
  if (checkpoints_per_decade < 1) throw config_error("checkpoints_per_decade must be >= 1");
  if (!(cov_decay > 0.0) || cov_decay > 1.0) throw config_error("cov_decay must lie in (0,1]");
  if (cov_rank_cap < 1) throw config_error("cov_rank_cap must be >= 1");
  if (reference_samples < 100) throw config_error("reference.samples must be >= 100");
  if (!(reference_h > 0.0)) throw config_error("reference.h must be positive");
  if (threads < 0) throw config_error("threads must be >= 0");
  if (out_dir.empty()) throw config_error("out directory must be set");
  if (gaussian_dim < 1) throw config_error("gaussian.D must be >= 1");
  if (gaussian_data_size < 1) throw config_error("gaussian.N must be >= 1");
  if (gaussian_noise_sigma2 < 0.0) throw config_error("gaussian.noise_sigma2 must be >= 0");
  if (mixture_data_size < 1) throw config_error("mixture.N must be >= 1");
  if (mixture_theta_star.size() != 2) throw config_error("mixture.theta_star needs 2 entries");
  if (blr_data_size < 1) throw config_error("blr.N must be >= 1");
  if (blr_dim < 2) throw config_error("blr.D must be >= 2");
  if (!blr_theta_star.empty() && static_cast<int>(blr_theta_star.size()) != blr_dim)
    throw config_error("blr.theta_star must have blr.D entries");
  if (observable != "variance" && observable != "mean")
    throw config_error("observable must be variance or mean");
}

std::string ExperimentConfig::serialize() const {
  std::string s;
  s += "model = " + model_kind + "\n";
  s += "methods = " + fmt_list(methods) + "\n";
  s += "stepsizes = " + fmt_list(stepsizes) + "\n";
  s += "batch_sizes = " + fmt_list(batch_sizes) + "\n";
  for (const auto& [m, mult] : step_multiplier) s += "mult." + m + " = " + fmt(mult) + "\n";
  s += "chains = " + std::to_string(chains) + "\n";
  s += "epochs = " + fmt(epochs) + "\n";
  s += "gamma = " + fmt(gamma) + "\n";
  s += "beta = " + fmt(beta) + "\n";
  s += "thin = " + std::to_string(thin) + "\n";
  s += "observable = " + observable + "\n";
  s += "checkpoints_per_decade = " + std::to_string(checkpoints_per_decade) + "\n";
  s += "cov_decay = " + fmt(cov_decay) + "\n";
  s += "cov_rank_cap = " + std::to_string(cov_rank_cap) + "\n";
  s += "seed = " + std::to_string(seed) + "\n";
  s += "threads = " + std::to_string(threads) + "\n";
  s += "out = " + out_dir + "\n";
  s += "gaussian.D = " + std::to_string(gaussian_dim) + "\n";
  s += "gaussian.N = " + std::to_string(gaussian_data_size) + "\n";
  s += "gaussian.eta = " + fmt_list(gaussian_eta) + "\n";
  s += "gaussian.omega_diag = " + fmt_list(gaussian_omega_diag) + "\n";
  s += "gaussian.noise_sigma2 = " + fmt(gaussian_noise_sigma2) + "\n";
  s += "mixture.N = " + std::to_string(mixture_data_size) + "\n";
  s += "mixture.theta_star = " + fmt_list(mixture_theta_star) + "\n";
  s += "mixture.data_seed = " + std::to_string(mixture_data_seed) + "\n";
  s += "blr.N = " + std::to_string(blr_data_size) + "\n";
  s += "blr.D = " + std::to_string(blr_dim) + "\n";
  if (!blr_theta_star.empty()) s += "blr.theta_star = " + fmt_list(blr_theta_star) + "\n";
  s += "blr.data_seed = " + std::to_string(blr_data_seed) + "\n";
  if (!blr_csv.empty()) s += "blr.csv = " + blr_csv + "\n";
  s += "reference.samples = " + std::to_string(reference_samples) + "\n";
  s += "reference.burnin = " + std::to_string(reference_burnin) + "\n";
  s += "reference.h = " + fmt(reference_h) + "\n";
  s += "reference.seed = " + std::to_string(reference_seed) + "\n";
  return s;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool preset_seen = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int keys_seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw parse_error("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw parse_error("empty key", lineno);
    if (val.empty()) throw parse_error("empty value for key '" + key + "'", lineno);

    if (key == "preset") {
      if (keys_seen > 0) throw parse_error("preset must be the first setting", lineno);
      if (preset_seen) throw parse_error("duplicate preset", lineno);
      cfg = preset_config(val);
      preset_seen = true;
      continue;
    }
    ++keys_seen;

    if (key == "model") cfg.model_kind = val;
    else if (key == "methods") cfg.methods = split_list(val);
    else if (key == "stepsizes") cfg.stepsizes = parse_double_list(val, lineno);
    else if (key == "batch_sizes") {
      cfg.batch_sizes.clear();
      for (const auto& tok : split_list(val))
        cfg.batch_sizes.push_back(static_cast<int>(parse_int(tok, lineno)));
    } else if (key.rfind("mult.", 0) == 0) {
      cfg.step_multiplier[key.substr(5)] = parse_double(val, lineno);
    } else if (key == "chains") cfg.chains = static_cast<int>(parse_int(val, lineno));
    else if (key == "epochs") cfg.epochs = parse_double(val, lineno);
    else if (key == "gamma") cfg.gamma = parse_double(val, lineno);
    else if (key == "beta") cfg.beta = parse_double(val, lineno);
    else if (key == "thin") cfg.thin = static_cast<int>(parse_int(val, lineno));
    else if (key == "observable") cfg.observable = val;
    else if (key == "checkpoints_per_decade")
      cfg.checkpoints_per_decade = static_cast<int>(parse_int(val, lineno));
    else if (key == "cov_decay") cfg.cov_decay = parse_double(val, lineno);
    else if (key == "cov_rank_cap") cfg.cov_rank_cap = static_cast<int>(parse_int(val, lineno));
    else if (key == "seed") cfg.seed = parse_u64(val, lineno);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(val, lineno));
    else if (key == "out") cfg.out_dir = val;
    else if (key == "gaussian.D") cfg.gaussian_dim = static_cast<int>(parse_int(val, lineno));
    else if (key == "gaussian.N") cfg.gaussian_data_size = parse_int(val, lineno);
    else if (key == "gaussian.eta") cfg.gaussian_eta = parse_double_list(val, lineno);
    else if (key == "gaussian.omega_diag") cfg.gaussian_omega_diag = parse_double_list(val, lineno);
    else if (key == "gaussian.noise_sigma2") cfg.gaussian_noise_sigma2 = parse_double(val, lineno);
    else if (key == "mixture.N") cfg.mixture_data_size = parse_int(val, lineno);
    else if (key == "mixture.theta_star") cfg.mixture_theta_star = parse_double_list(val, lineno);
    else if (key == "mixture.data_seed") cfg.mixture_data_seed = parse_u64(val, lineno);
    else if (key == "blr.N") cfg.blr_data_size = parse_int(val, lineno);
    else if (key == "blr.D") cfg.blr_dim = static_cast<int>(parse_int(val, lineno));
    else if (key == "blr.theta_star") cfg.blr_theta_star = parse_double_list(val, lineno);
    else if (key == "blr.data_seed") cfg.blr_data_seed = parse_u64(val, lineno);
    else if (key == "blr.csv") cfg.blr_csv = val;
    else if (key == "reference.samples") cfg.reference_samples = parse_u64(val, lineno);
    else if (key == "reference.burnin") cfg.reference_burnin = parse_u64(val, lineno);
    else if (key == "reference.h") cfg.reference_h = parse_double(val, lineno);
    else if (key == "reference.seed") cfg.reference_seed = parse_u64(val, lineno);
    else throw parse_error("unknown key '" + key + "'", lineno);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open config file for writing: " + path);
  out << cfg.serialize();
}

std::vector<std::string> preset_names() { return {"gmix-paper", "blr-desk", "blr-mnist"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "gmix-paper") {
    // Mixture setup at desk-scale budget: N = 1000 datapoints around
    // theta* = [0.5, 0], 300 epochs instead of the full 30000.
    cfg.model_kind = "mixture";
    cfg.mixture_data_size = 1000;
    cfg.mixture_theta_star = {0.5, 0.0};
    cfg.mixture_data_seed = 1;
    cfg.methods = {"nogin", "sgld", "msgld", "sghmc", "sgnht", "ccadl"};
    cfg.stepsizes = {0.05};
    cfg.batch_sizes = {10, 100, 1000};
    cfg.step_multiplier = {{"sgld", 0.002}, {"msgld", 0.002}, {"sgnht", 0.2}, {"ccadl", 0.2},
                           {"sghmc", 0.2}};
    cfg.chains = 4;
    cfg.epochs = 300.0;
    cfg.gamma = 1.0;
    cfg.reference_samples = 400000;
    cfg.reference_burnin = 20000;
    cfg.reference_h = 0.045;
    cfg.reference_seed = 7;
    cfg.out_dir = "out/gmix";
  } else if (name == "blr-desk") {
    // Logistic regression scaled to run in minutes: N = 2000, D = 16.
    cfg.model_kind = "blr";
    cfg.blr_data_size = 2000;
    cfg.blr_dim = 16;
    cfg.blr_data_seed = 3;
    cfg.methods = {"nogin", "sgld", "sghmc"};
    cfg.stepsizes = {0.02};
    cfg.batch_sizes = {50, 200, 2000};
    cfg.step_multiplier = {{"sgld", 0.01}, {"sghmc", 0.25}};
    cfg.chains = 2;
    cfg.epochs = 200.0;
    cfg.gamma = 1.0;
    cfg.reference_samples = 200000;
    cfg.reference_burnin = 10000;
    cfg.reference_h = 0.05;
    cfg.reference_seed = 7;
    cfg.out_dir = "out/blr";
  } else if (name == "blr-mnist") {
    // Full-scale logistic regression dimensions; requires a user-supplied
    // CSV of pre-projected features (set blr.csv).
    cfg.model_kind = "blr";
    cfg.blr_data_size = 12214;
    cfg.blr_dim = 129;
    cfg.methods = {"nogin", "sgld", "msgld", "sghmc", "sgnht", "ccadl"};
    cfg.stepsizes = {0.01};
    cfg.batch_sizes = {100, 1000, 12214};
    cfg.step_multiplier = {{"sgld", 0.01}, {"msgld", 0.01}};
    cfg.chains = 2;
    cfg.epochs = 200.0;
    cfg.gamma = 1.0;
    cfg.reference_samples = 200000;
    cfg.reference_burnin = 20000;
    cfg.reference_h = 0.02;
    cfg.reference_seed = 7;
    cfg.out_dir = "out/blr-mnist";
  } else {
    throw config_error("unknown preset: " + name);
  }
  return cfg;
}

std::unique_ptr<TargetModel> build_model(const ExperimentConfig& cfg) {
  if (cfg.model_kind == "gaussian")
    return build_gaussian_model(cfg, cfg.gaussian_noise_sigma2);
  if (cfg.model_kind == "mixture") {
    RngStream rng(cfg.mixture_data_seed, 0);
    Eigen::VectorXd star = Eigen::Map<const Eigen::VectorXd>(cfg.mixture_theta_star.data(), 2);
    return std::make_unique<MixtureModel>(
        generate_mixture_data(rng, cfg.mixture_data_size, star));
  }
  if (cfg.model_kind == "blr") {
    BlrData data;
    if (!cfg.blr_csv.empty()) {
      data = csv_load_blr(cfg.blr_csv);
    } else {
      Eigen::VectorXd star(cfg.blr_dim);
      if (cfg.blr_theta_star.empty()) {
        // Deterministic default: decaying alternating coefficients with a
        // small constant term.
        for (int j = 0; j + 1 < cfg.blr_dim; ++j)
          star[j] = (j % 2 == 0 ? 1.0 : -1.0) * (1.0 - 0.5 * j / cfg.blr_dim);
        star[cfg.blr_dim - 1] = 0.25;
      } else {
        star = Eigen::Map<const Eigen::VectorXd>(cfg.blr_theta_star.data(),
                                                 static_cast<Eigen::Index>(cfg.blr_theta_star.size()));
      }
      RngStream rng(cfg.blr_data_seed, 0);
      data = generate_blr_data(rng, cfg.blr_data_size, cfg.blr_dim, star);
    }
    return std::make_unique<BlrModel>(std::move(data.features), std::move(data.labels));
  }
  throw config_error("unknown model kind: " + cfg.model_kind);
}

std::unique_ptr<TargetModel> build_gaussian_model(const ExperimentConfig& cfg,
                                                  double noise_sigma2) {
  const int d = cfg.gaussian_dim;
  auto broadcast = [&](const std::vector<double>& v, const char* what) {
    if (v.size() == 1) return Eigen::VectorXd::Constant(d, v[0]).eval();
    if (static_cast<int>(v.size()) != d)
      throw config_error(std::string(what) + " must have 1 or gaussian.D entries");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), d).eval();
  };
  const Eigen::VectorXd eta = broadcast(cfg.gaussian_eta, "gaussian.eta");
  const Eigen::VectorXd omega_diag = broadcast(cfg.gaussian_omega_diag, "gaussian.omega_diag");
  if ((omega_diag.array() <= 0.0).any())
    throw config_error("gaussian.omega_diag entries must be positive");
  return std::make_unique<GaussianSyntheticModel>(
      eta, Eigen::MatrixXd(omega_diag.asDiagonal()),
      LowRankPSD::scaled_identity(d, noise_sigma2), cfg.gaussian_data_size);
}

}  // namespace nogin::bench
