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

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "nogin/bench/config.hpp"
#include "nogin/bench/results.hpp"
#include "nogin/diagnostics.hpp"

namespace nogin::bench {

// Run the indexed tasks on `threads` workers (0 = hardware concurrency).
// Tasks must be independent; exceptions are rethrown after the pool drains.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

// Long unbiased MALA run; writes the cache keyed by the model hash and
// returns the moments. Acceptance outside [0.2, 0.9] records a warning in the
// cache (still written).
ReferenceMoments run_reference(const ExperimentConfig& cfg, std::ostream& log);

// Load the cache for this config's model; throws config_error directing the
// user to the reference command when missing.
ReferenceMoments load_reference(const ExperimentConfig& cfg);

struct SweepOutcome {
  std::vector<CellResult> cells;
  std::string csv_path;
  std::string json_path;
  std::string model_hash;
};

// Every (method, h, n, chain) cell, parallel across cells, deterministic per
// cell: the RNG stream is keyed by (config seed, cell ordinal) so results are
// independent of thread scheduling.
SweepOutcome run_sweep(const ExperimentConfig& cfg, std::ostream& log);

// Initial position for a model built from this config.
Eigen::VectorXd initial_theta(const ExperimentConfig& cfg, const TargetModel& model);

}  // namespace nogin::bench
