#ifndef DROFA_HARNESS_HPP
#define DROFA_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drofa/algorithms.hpp"
#include "drofa/metrics.hpp"
#include "drofa/objectives.hpp"

namespace drofa {

enum class FederationSource { synthetic, csv, quadratic };
enum class Preset { none, theorem1, theorem2_appendix };

struct FederationConfig {
  FederationSource source = FederationSource::synthetic;
  SyntheticSpec synthetic;
  std::string csv_path;
  CsvSpec csv;
  std::vector<Vec> centers;  // quadratic source
  double curvature = 1.0;
  double l2_term = 0.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  FederationConfig federation;
  AlgoConfig algo;
  std::vector<std::uint64_t> seeds = {0};
  long eval_every = 1;  // stages between metric evaluations
  std::string output_dir = "out";
  Preset preset = Preset::none;
  // held-out per-client resample used for accuracy metrics (0: evaluate
  // on the training shards)
  std::size_t eval_samples_per_client = 0;
};

// Strict parse: unknown keys are rejected, defaults are echoed into the
// returned config.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

Federation build_federation(const FederationConfig& fc, std::uint64_t seed);

// Resolve a preset into concrete (eta, gamma, tau) from the federation's
// smoothness and strong-convexity constants. No-op for Preset::none.
void apply_preset(ExperimentConfig& cfg, const Federation& fed);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<MetricRecord> records;
  MetricRecord final_record;
  Vec w_hat;
  Vec lambda_hat;
  double wall_seconds = 0.0;
};

struct ResultsBundle {
  ExperimentConfig config;
  std::vector<SeedResult> per_seed;
  double wall_seconds_total = 0.0;
};

// Runs every seed, evaluating metrics at stage boundaries, and writes
// metrics.csv, lambda_trace.csv and summary.json into the output dir
// (write_files = false skips the files).
ResultsBundle run_experiment(const ExperimentConfig& cfg,
                             bool write_files = true);

struct CrossingStat {
  std::string config_name;
  std::uint64_t seed;
  double threshold;
  long comm_rounds;  // -1: never reached
  long iteration;
};

struct ComparisonResult {
  std::vector<ResultsBundle> bundles;
  std::vector<CrossingStat> crossings;
};

// Paired comparison across configs sharing seeds and a federation spec.
// Writes comparison.csv (long format) and crossings.csv when out_dir is
// nonempty.
ComparisonResult compare(const std::vector<ExperimentConfig>& cfgs,
                         const std::string& out_dir = "");

// shortest round-trip decimal formatting for 64-bit floats
std::string format_double(double x);

}  // namespace drofa

#endif
