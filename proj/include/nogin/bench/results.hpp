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
#include <string>
#include <vector>

#include "nogin/bench/config.hpp"
#include "nogin/diagnostics.hpp"

namespace nogin::bench {

// One sweep cell-chain: its checkpoint curve plus stability bookkeeping.
struct CellResult {
  std::string method;
  double h = 0.0;  // effective stepsize (multiplier applied)
  int batch_size = 0;
  int chain = 0;
  bool stable = true;
  std::uint64_t divergence_step = 0;
  std::string failure;
  std::vector<CurvePoint> curve;
  std::uint64_t grad_evals = 0;
  std::uint64_t steps = 0;
  double wall_ms = 0.0;
};

// CSV schema: header then one checkpoint per row,
//   method,h,n,chain,epoch,observable,value,mse,stable
// Doubles print as %.17g so repeated runs are byte-identical.
void write_results_csv(const std::string& path, const std::vector<CellResult>& cells,
                       const std::string& observable);

struct ResultRow {
  std::string method;
  double h;
  int batch_size;
  int chain;
  double epoch;
  std::string observable;
  double value;
  double mse;
  bool stable;
};

std::vector<ResultRow> read_results_csv(const std::string& path);

// JSON summary: config echo, model hash, per-cell records (wall time lives
// here, never in the CSV).
void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const std::string& model_hash_hex,
                        const std::vector<CellResult>& cells);

std::string summary_model_hash(const std::string& path);

// Reference-moment cache (JSON, keyed by model hash).
std::string reference_cache_path(const std::string& out_dir, const std::string& model_hash_hex);
void save_reference(const std::string& path, const ReferenceMoments& ref);
ReferenceMoments load_reference_file(const std::string& path);

}  // namespace nogin::bench
