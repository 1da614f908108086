/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include "nogin/bench/results.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nogin/errors.hpp"

namespace nogin::bench {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_results_csv(const std::string& path, const std::vector<CellResult>& cells,
                       const std::string& observable) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open results CSV for writing: " + path);
  out << "method,h,n,chain,epoch,observable,value,mse,stable\n";
  for (const CellResult& cell : cells) {
    const char* stable = cell.stable ? "1" : "0";
    for (const CurvePoint& p : cell.curve) {
      out << cell.method << ',' << fmt(cell.h) << ',' << cell.batch_size << ',' << cell.chain
          << ',' << fmt(p.epoch) << ',' << observable << ',' << fmt(p.value) << ',' << fmt(p.mse)
          << ',' << stable << '\n';
    }
    if (cell.curve.empty()) {
      // Keep one row per unstable cell so plots can blank it.
      out << cell.method << ',' << fmt(cell.h) << ',' << cell.batch_size << ',' << cell.chain
          << ",nan," << observable << ",nan,nan," << stable << '\n';
    }
  }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open results CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty results CSV: " + path);
  if (line != "method,h,n,chain,epoch,observable,value,mse,stable")
    throw parse_error("unexpected results CSV header: " + line, 1);
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 9) throw parse_error("expected 9 fields", lineno);
    ResultRow r;
    r.method = f[0];
    try {
      r.h = std::stod(f[1]);
      r.batch_size = std::stoi(f[2]);
      r.chain = std::stoi(f[3]);
      r.epoch = std::stod(f[4]);
      r.observable = f[5];
      r.value = std::stod(f[6]);
      r.mse = std::stod(f[7]);
      r.stable = f[8] == "1";
    } catch (const std::exception&) {
      throw parse_error("malformed results row", lineno);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw parse_error("results CSV has no rows: " + path);
  return rows;
}

void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const std::string& model_hash_hex,
                        const std::vector<CellResult>& cells) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["model_hash"] = model_hash_hex;
  j["config"] = cfg.serialize();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CellResult& cell : cells) {
    nlohmann::ordered_json c;
    c["method"] = cell.method;
    c["h"] = cell.h;
    c["n"] = cell.batch_size;
    c["chain"] = cell.chain;
    c["stable"] = cell.stable;
    if (!cell.stable) {
      c["divergence_step"] = cell.divergence_step;
      c["failure"] = cell.failure;
    }
    c["steps"] = cell.steps;
    c["grad_evals"] = cell.grad_evals;
    c["final_mse"] = cell.curve.empty() ? nullptr
                                        : nlohmann::ordered_json(cell.curve.back().mse);
    c["wall_ms"] = cell.wall_ms;
    arr.push_back(std::move(c));
  }
  j["cells"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open summary JSON for writing: " + path);
  out << j.dump(2) << '\n';
}

std::string summary_model_hash(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open summary JSON: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("model_hash")) throw parse_error("summary JSON lacks model_hash: " + path);
  return j["model_hash"].get<std::string>();
}

std::string reference_cache_path(const std::string& out_dir, const std::string& model_hash_hex) {
  return out_dir + "/reference-" + model_hash_hex + ".json";
}

void save_reference(const std::string& path, const ReferenceMoments& ref) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["model_hash"] = ref.model_hash;
  j["seed"] = ref.seed;
  j["count"] = ref.count;
  j["acceptance_rate"] = ref.acceptance_rate;
  j["acceptance_warning"] = ref.acceptance_warning;
  j["mean"] = std::vector<double>(ref.mean.data(), ref.mean.data() + ref.mean.size());
  j["variance"] =
      std::vector<double>(ref.variance.data(), ref.variance.data() + ref.variance.size());
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open reference cache for writing: " + path);
  out << j.dump(2) << '\n';
}

ReferenceMoments load_reference_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("reference cache not found at " + path +
                       "; run `noginbench reference --config <file>` first");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw parse_error("malformed reference cache " + path + ": " + e.what());
  }
  ReferenceMoments ref;
  ref.model_hash = j.at("model_hash").get<std::string>();
  ref.seed = j.at("seed").get<std::uint64_t>();
  ref.count = j.at("count").get<std::uint64_t>();
  ref.acceptance_rate = j.at("acceptance_rate").get<double>();
  ref.acceptance_warning = j.at("acceptance_warning").get<bool>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto var = j.at("variance").get<std::vector<double>>();
  ref.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  ref.variance =
      Eigen::Map<const Eigen::VectorXd>(var.data(), static_cast<Eigen::Index>(var.size()));
  return ref;
}

}  // namespace nogin::bench
