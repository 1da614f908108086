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
#include <array>
#include <cstdint>

namespace nogin {

// Counter-based pseudorandom stream (Philox4x32-10).
//
// The generator is a pure function of (seed, chain, block counter), so a
// stream rebuilt from the same (seed, chain) replays bit-identical draws,
// and distinct chain indices give statistically independent streams without
// any coordination. Normal draws use Box-Muller rather than
// std::normal_distribution, whose output is implementation-defined.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t chain);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform integer in [0, bound), unbiased via rejection. bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double strictly inside (0, 1).
  double uniform();

  // Standard normal draw.
  double normal();

  // d independent standard normal draws.
  Eigen::VectorXd normal_vector(Eigen::Index d);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t chain() const { return chain_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t chain_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_;
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// d independent N(0,1) draws; advances the stream deterministically.
inline Eigen::VectorXd standard_normal_vector(RngStream& rng, Eigen::Index d) {
  return rng.normal_vector(d);
}

}  // namespace nogin
