/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/samplers.hpp"

#include <cmath>
#include <limits>

#include "nogin/errors.hpp"

namespace nogin {

namespace {
constexpr double kRunawayNorm = 1e8;
}

void phi_A(State& s, double t, const MassSpec& mass) {
  if (t == 0.0) return;
  if (mass.is_identity())
    s.theta += t * s.p;
  else
    s.theta += t * mass.apply_inv(s.p);
}

void phi_B(State& s, double t, const Eigen::VectorXd& force) {
  if (t == 0.0) return;
  s.p += t * force;
}

// ---------------------------------------------------------------------------
// DampingOperator

DampingOperator::DampingOperator(const LowRankPSD& sigma, double lambda2, double h, double beta,
                                 const MassSpec& mass)
    : lambda2_(lambda2), sigma_(sigma) {
  const bool iso = mass.is_isotropic();
  const double m_iso = iso ? mass.iso_value() : 1.0;
  quarter_h2_ = h * h * m_iso / (4.0 * beta);

  double s_min = 0.0, s_max = 0.0;
  if (iso) {
    const auto [lo, hi] = sigma.eig_bounds();
    s_min = lo;
    s_max = hi;
    if (sigma.rank() == 0 || sigma.scale() == 0.0) {
      path_ = Path::scalar_sigma;
      const double x = quarter_h2_ * sigma.alpha();
      scalar_factor_ = (1.0 - lambda2 - x) / (1.0 + lambda2 + x);
    } else {
      path_ = Path::isotropic;
    }
  } else if (sigma.alpha() == 0.0) {
    // Conjugate by the Cholesky factor of M: the effective operator
    // L^T Sigma L / 1 stays low-rank because Sigma has no diagonal part.
    const Eigen::Index d = sigma.dim();
    Eigen::MatrixXd cols = sigma.columns();
    Eigen::MatrixXd lt = mass.chol_matrix(d).transpose();
    sigma_ = LowRankPSD(0.0, sigma.scale(), lt * cols);
    quarter_h2_ = h * h / (4.0 * beta);
    mass_ = &mass;
    path_ = Path::transformed;
    const auto [lo, hi] = sigma_.eig_bounds();
    s_min = lo;
    s_max = hi;
  } else {
    // General dense fallback: exact, used only off the hot paths.
    const Eigen::Index d = sigma.dim();
    quarter_h2_ = h * h / (4.0 * beta);
    const Eigen::MatrixXd ms = mass.apply(Eigen::MatrixXd::Identity(d, d)) * sigma.dense();
    dense_minus_ = (1.0 - lambda2) * Eigen::MatrixXd::Identity(d, d) - quarter_h2_ * ms;
    dense_plus_.compute((1.0 + lambda2) * Eigen::MatrixXd::Identity(d, d) + quarter_h2_ * ms);
    path_ = Path::dense;
    const Eigen::MatrixXd l = mass.chol_matrix(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l.transpose() * sigma.dense() * l);
    s_min = es.eigenvalues().minCoeff();
    s_max = es.eigenvalues().maxCoeff();
  }

  // Damping eigenvalues are (1 - lambda2 - x)/(1 + lambda2 + x) over
  // x = quarter_h2 * s; the map is decreasing in x.
  const double x_min = quarter_h2_ * s_min;
  const double x_max = quarter_h2_ * s_max;
  factor_max_ = (1.0 - lambda2 - x_min) / (1.0 + lambda2 + x_min);
  factor_min_ = (1.0 - lambda2 - x_max) / (1.0 + lambda2 + x_max);
  if (!(1.0 + lambda2 + x_min > 0.0) || !(factor_max_ < 1.0) || !(factor_min_ > -1.0) ||
      !std::isfinite(factor_min_) || !std::isfinite(factor_max_)) {
    const double bound = std::abs(factor_max_) >= std::abs(factor_min_) ? factor_max_ : factor_min_;
    throw stability_error("damping would amplify momentum (stepsize too large for this noise)",
                          bound);
  }
}

void DampingOperator::apply_in_place(Eigen::VectorXd& p) const {
  switch (path_) {
    case Path::scalar_sigma:
      p *= scalar_factor_;
      return;
    case Path::isotropic: {
      Eigen::VectorXd w = (1.0 - lambda2_) * p - quarter_h2_ * sigma_.apply(p);
      p = sigma_.solve_shifted(1.0 + lambda2_, quarter_h2_, w);
      return;
    }
    case Path::transformed: {
      Eigen::VectorXd q = mass_->chol_solve(p);
      Eigen::VectorXd w = (1.0 - lambda2_) * q - quarter_h2_ * sigma_.apply(q);
      p = mass_->chol_mul(sigma_.solve_shifted(1.0 + lambda2_, quarter_h2_, w));
      return;
    }
    case Path::dense:
      p = dense_plus_.solve(dense_minus_ * p);
      return;
  }
}

// ---------------------------------------------------------------------------
// Sampler base

double Sampler::last_diagnostic() const { return std::numeric_limits<double>::quiet_NaN(); }

void Sampler::bump_and_check(const State& state) {
  ++steps_done_;
  if (!state.finite() || state.p.norm() > kRunawayNorm || state.theta.norm() > kRunawayNorm)
    throw divergence_error("chain diverged", steps_done_);
}

namespace {

class NoginSampler final : public Sampler {
 public:
  NoginSampler(const TargetModel& model, const SamplerConfig& cfg)
      : model_(model),
        cfg_(cfg),
        tracker_(model.dim(), cfg.cov_decay, cfg.cov_rank_cap),
        lambda2_(cfg.lambda2()),
        lambda_(std::sqrt(cfg.lambda2())) {}

  std::uint64_t step(State& s, RngStream& rng) override {
    const double half = cfg_.h / 2.0;
    phi_A(s, half, cfg_.mass);
    NoisyForce nf;
    try {
      nf = minibatch_force(model_, s.theta, cfg_.batch_size, rng, tracker_);
    } catch (const numeric_error&) {
      throw divergence_error("chain diverged (non-finite force)", steps_done_ + 1);
    }
    DampingOperator damping(nf.covariance, lambda2_, cfg_.h, cfg_.beta, cfg_.mass);
    Eigen::VectorXd noise = mass_sample(rng, cfg_.mass, cfg_.beta, s.dim());
    s.p += half * nf.value + lambda_ * noise;
    damping.apply_in_place(s.p);
    if (cfg_.fresh_second_noise) noise = mass_sample(rng, cfg_.mass, cfg_.beta, s.dim());
    s.p += half * nf.value + lambda_ * noise;
    phi_A(s, half, cfg_.mass);
    bump_and_check(s);
    return static_cast<std::uint64_t>(cfg_.batch_size);
  }

  std::string name() const override { return "nogin"; }
  std::int64_t dataset_size() const override { return model_.data_size(); }

 private:
  const TargetModel& model_;
  SamplerConfig cfg_;
  CovarianceTracker tracker_;
  double lambda2_;
  double lambda_;
};

class AbobaSampler final : public Sampler {
 public:
  AbobaSampler(const TargetModel& model, const SamplerConfig& cfg)
      : model_(model), cfg_(cfg), decay_(std::exp(-cfg.gamma * cfg.h)),
        noise_scale_(std::sqrt(1.0 - decay_ * decay_)) {}

  std::uint64_t step(State& s, RngStream& rng) override {
    const double half = cfg_.h / 2.0;
    phi_A(s, half, cfg_.mass);
    Eigen::VectorXd f;
    try {
      f = true_force(model_, s.theta);
    } catch (const numeric_error&) {
      throw divergence_error("chain diverged (non-finite force)", steps_done_ + 1);
    }
    phi_B(s, half, f);
    s.p = decay_ * s.p + noise_scale_ * mass_sample(rng, cfg_.mass, cfg_.beta, s.dim());
    phi_B(s, half, f);
    phi_A(s, half, cfg_.mass);
    bump_and_check(s);
    return static_cast<std::uint64_t>(model_.data_size());
  }

  std::string name() const override { return "aboba"; }
  std::int64_t dataset_size() const override { return model_.data_size(); }

 private:
  const TargetModel& model_;
  SamplerConfig cfg_;
  double decay_;
  double noise_scale_;
};

// Baseline forms follow the original sources; they are comparators here.
// SGLD (Welling & Teh 2011):   theta += (eps/2) F~ + N(0, eps/beta).
class SgldSampler final : public Sampler {
 public:
  SgldSampler(const TargetModel& model, const SamplerConfig& cfg)
      : model_(model), cfg_(cfg), tracker_(model.dim(), cfg.cov_decay, cfg.cov_rank_cap) {}

  std::uint64_t step(State& s, RngStream& rng) override {
    const double eps = cfg_.h;
    NoisyForce nf = estimate(s, rng);
    s.theta += 0.5 * eps * nf.value +
               std::sqrt(eps / cfg_.beta) * rng.normal_vector(s.dim());
    bump_and_check(s);
    return static_cast<std::uint64_t>(cfg_.batch_size);
  }

  std::string name() const override { return "sgld"; }
  std::int64_t dataset_size() const override { return model_.data_size(); }

 protected:
  NoisyForce estimate(State& s, RngStream& rng) {
    try {
      return minibatch_force(model_, s.theta, cfg_.batch_size, rng, tracker_);
    } catch (const numeric_error&) {
      throw divergence_error("chain diverged (non-finite force)", steps_done_ + 1);
    }
  }

  const TargetModel& model_;
  SamplerConfig cfg_;
  CovarianceTracker tracker_;
};

// mSGLD (Vollmer et al. 2016): injected noise scaled by (I - (eps/4) Sigma~).
class MsgldSampler final : public SgldSampler {
 public:
  using SgldSampler::SgldSampler;

  std::uint64_t step(State& s, RngStream& rng) override {
    const double eps = cfg_.h;
    NoisyForce nf = estimate(s, rng);
    Eigen::VectorXd z = rng.normal_vector(s.dim());
    z -= (eps / 4.0) * nf.covariance.apply(z);
    s.theta += 0.5 * eps * nf.value + std::sqrt(eps / cfg_.beta) * z;
    bump_and_check(s);
    return static_cast<std::uint64_t>(cfg_.batch_size);
  }

  std::string name() const override { return "msgld"; }
};

// SGHMC (Chen et al. 2014): friction C >= (eps/2) Sigma~ with injected noise
// N(0, 2 eps (C - (eps/2) Sigma~)). C is the scalar cfg.gamma, raised when the
// covariance estimate would make the noise covariance indefinite.
class SghmcSampler final : public SgldSampler {
 public:
  using SgldSampler::SgldSampler;

  std::uint64_t step(State& s, RngStream& rng) override {
    const double eps = cfg_.h;
    NoisyForce nf = estimate(s, rng);
    const double s_max = nf.covariance.eig_bounds().second;
    const double c_eff = std::max(cfg_.gamma, 0.5 * eps * s_max * (1.0 + 1e-9));
    const Eigen::VectorXd noise =
        nf.covariance.sample_gaussian(rng, 2.0 * eps * c_eff / cfg_.beta, -eps * eps / cfg_.beta);
    s.p += eps * nf.value - eps * c_eff * s.p + noise;
    s.theta += eps * s.p;
    bump_and_check(s);
    return static_cast<std::uint64_t>(cfg_.batch_size);
  }

  std::string name() const override { return "sghmc"; }
};

// SGNHT (Ding et al. 2014): scalar thermostat xi, diffusion a = cfg.gamma.
//   p <- p + eps F~ - eps xi p + N(0, 2 a eps / beta)
//   theta <- theta + eps p ;  xi <- xi + eps (p.p/D - 1/beta)
class SgnhtSampler : public SgldSampler {
 public:
  SgnhtSampler(const TargetModel& model, const SamplerConfig& cfg)
      : SgldSampler(model, cfg), xi_(cfg.gamma) {}

  std::uint64_t step(State& s, RngStream& rng) override {
    const double eps = cfg_.h;
    NoisyForce nf = estimate(s, rng);
    s.p += eps * nf.value - eps * xi_ * s.p + injected_noise(nf, rng, s.dim());
    s.theta += eps * s.p;
    xi_ += eps * (s.p.squaredNorm() / static_cast<double>(s.dim()) - 1.0 / cfg_.beta);
    bump_and_check(s);
    return static_cast<std::uint64_t>(cfg_.batch_size);
  }

  std::string name() const override { return "sgnht"; }

 protected:
  virtual Eigen::VectorXd injected_noise(const NoisyForce&, RngStream& rng, Eigen::Index d) {
    return std::sqrt(2.0 * cfg_.gamma * cfg_.h / cfg_.beta) * rng.normal_vector(d);
  }

  double xi_;
};

// CC-ADL (Shang et al. 2015): SGNHT thermostat with the injected noise
// compensated by the covariance estimate, N(0, 2 a eps - eps^2 Sigma~).
class CcadlSampler final : public SgnhtSampler {
 public:
  using SgnhtSampler::SgnhtSampler;
  std::string name() const override { return "ccadl"; }

 protected:
  Eigen::VectorXd injected_noise(const NoisyForce& nf, RngStream& rng, Eigen::Index) override {
    const double eps = cfg_.h;
    const double s_max = nf.covariance.eig_bounds().second;
    const double a_eff = std::max(cfg_.gamma, 0.5 * eps * s_max * (1.0 + 1e-9));
    return nf.covariance.sample_gaussian(rng, 2.0 * eps * a_eff / cfg_.beta,
                                         -eps * eps / cfg_.beta);
  }
};

// MALA (Roberts & Tweedie 1996): Langevin proposal + Metropolis-Hastings
// correction. Unbiased; used for reference moments.
class MalaSampler final : public Sampler {
 public:
  MalaSampler(const TargetModel& model, const SamplerConfig& cfg) : model_(model), cfg_(cfg) {}

  std::uint64_t step(State& s, RngStream& rng) override {
    const double eps = cfg_.h;
    const double tau = eps * eps / 2.0;
    if (!have_current_) {
      lp_ = cfg_.beta * model_.log_density(s.theta);
      force_ = cfg_.beta * true_force(model_, s.theta);
      have_current_ = true;
    }
    Eigen::VectorXd prop = s.theta + tau * force_ + eps * rng.normal_vector(s.dim());
    const double lp_prop = cfg_.beta * model_.log_density(prop);
    Eigen::VectorXd force_prop = cfg_.beta * true_force(model_, prop);
    const Eigen::VectorXd fwd = prop - s.theta - tau * force_;
    const Eigen::VectorXd bwd = s.theta - prop - tau * force_prop;
    const double log_q = (fwd.squaredNorm() - bwd.squaredNorm()) / (2.0 * eps * eps);
    const double log_alpha = lp_prop - lp_ + log_q;
    accepted_ = std::log(rng.uniform()) < log_alpha;
    if (accepted_) {
      s.theta = std::move(prop);
      lp_ = lp_prop;
      force_ = std::move(force_prop);
    }
    bump_and_check(s);
    return static_cast<std::uint64_t>(model_.data_size());
  }

  std::string name() const override { return "mala"; }
  std::int64_t dataset_size() const override { return model_.data_size(); }
  double last_diagnostic() const override { return accepted_ ? 1.0 : 0.0; }

 private:
  const TargetModel& model_;
  SamplerConfig cfg_;
  bool have_current_ = false;
  bool accepted_ = false;
  double lp_ = 0.0;
  Eigen::VectorXd force_;
};

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "nogin") return Method::nogin;
  if (name == "aboba") return Method::aboba;
  if (name == "sgld") return Method::sgld;
  if (name == "msgld") return Method::msgld;
  if (name == "sghmc") return Method::sghmc;
  if (name == "sgnht") return Method::sgnht;
  if (name == "ccadl") return Method::ccadl;
  if (name == "mala") return Method::mala;
  throw config_error("unknown method name: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::nogin: return "nogin";
    case Method::aboba: return "aboba";
    case Method::sgld: return "sgld";
    case Method::msgld: return "msgld";
    case Method::sghmc: return "sghmc";
    case Method::sgnht: return "sgnht";
    case Method::ccadl: return "ccadl";
    case Method::mala: return "mala";
  }
  throw config_error("unknown method");
}

bool method_uses_minibatch(Method m) {
  switch (m) {
    case Method::nogin:
    case Method::sgld:
    case Method::msgld:
    case Method::sghmc:
    case Method::sgnht:
    case Method::ccadl: return true;
    case Method::aboba:
    case Method::mala: return false;
  }
  return false;
}

std::unique_ptr<Sampler> make_sampler(Method method, const TargetModel& model,
                                      const SamplerConfig& cfg) {
  cfg.validate();
  if (method_uses_minibatch(method) &&
      static_cast<std::int64_t>(cfg.batch_size) > model.data_size())
    throw config_error("batch size exceeds dataset size");
  switch (method) {
    case Method::nogin: return std::make_unique<NoginSampler>(model, cfg);
    case Method::aboba: return std::make_unique<AbobaSampler>(model, cfg);
    case Method::sgld: return std::make_unique<SgldSampler>(model, cfg);
    case Method::msgld: return std::make_unique<MsgldSampler>(model, cfg);
    case Method::sghmc: return std::make_unique<SghmcSampler>(model, cfg);
    case Method::sgnht: return std::make_unique<SgnhtSampler>(model, cfg);
    case Method::ccadl: return std::make_unique<CcadlSampler>(model, cfg);
    case Method::mala:
      if (!model.has_log_density())
        throw config_error("mala requires a model with an exact log-density");
      return std::make_unique<MalaSampler>(model, cfg);
  }
  throw config_error("unknown method");
}

ChainRun run_chain(Sampler& sampler, State state, RngStream& rng, std::uint64_t steps, int thin) {
  ChainRun out{Trajectory(thin, sampler.dataset_size()), true, 0, {}};
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint64_t cost;
    try {
      cost = sampler.step(state, rng);
    } catch (const divergence_error& e) {
      out.stable = false;
      out.divergence_step = e.step;
      out.failure = e.what();
      return out;
    } catch (const stability_error& e) {
      out.stable = false;
      out.divergence_step = sampler.steps_done() + 1;
      out.failure = e.what();
      return out;
    }
    out.trajectory.append(state.theta, cost, sampler.last_diagnostic());
  }
  return out;
}

State initial_state(const Eigen::VectorXd& theta0, const SamplerConfig& cfg, RngStream& rng) {
  State s;
  s.theta = theta0;
  s.p = mass_sample(rng, cfg.mass, cfg.beta, theta0.size());
  return s;
}

}  // namespace nogin
