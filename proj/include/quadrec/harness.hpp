#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quadrec/types.hpp"
#include "quadrec/wf.hpp"

namespace quadrec {

enum class ExperimentKind {
  init_closeness,
  phase_transition,
  image_recovery,
  init_comparison,
  bench_init,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

// Solver knobs exposed through experiment configs; the per-trial
// norm_sq_estimate is always filled in from the measurements.
struct SolverSettings {
  double step_scale = 0.1;
  int max_iters = 2500;
  double succ_tol = 1e-6;
  SolverConfig::StopMode stop_mode = SolverConfig::StopMode::relative;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::init_closeness;
  Index n = 64;
  std::vector<Index> n_grid;  // bench_init sweeps n; empty means {n}
  std::vector<double> m_over_n_grid;
  std::vector<double> q_values;
  int trials = 20;
  std::uint64_t base_seed = 42;
  SolverSettings solver;
  double success_tol = 1e-5;
  std::string output_path;  // empty: do not write files
  int power_iters = 10;

  void validate() const;
  std::vector<Index> effective_n_grid() const;
};

/// Desk-scale defaults per kind; `full_scale` switches to the paper-scale
/// grids and trial counts.
ExperimentConfig default_config(ExperimentKind kind, bool full_scale = false);

/// default_config overlaid with any fields present in the JSON file.
ExperimentConfig load_config(const std::string& path, ExperimentKind kind,
                             bool full_scale = false);
ExperimentConfig config_from_json_text(const std::string& text,
                                       ExperimentKind kind,
                                       bool full_scale = false);

struct TrialRecord {
  ExperimentKind kind = ExperimentKind::init_closeness;
  std::string variant;  // spectral/random, svd/power, or image channel r/g/b
  double q = 0.0;
  double m_over_n = 0.0;
  Index n = 0;
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> init_rel_distance;
  std::optional<double> final_rel_distance;
  std::optional<double> final_rel_error;  // image runs: || |z| - x || / ||x||
  std::optional<int> iters;
  std::optional<std::string> termination;
  std::optional<bool> success;  // final_rel_distance < success_tol
  double wall_time_ms = 0.0;    // excluded from determinism comparisons
};

void write_trials_csv(const std::string& path,
                      const std::vector<TrialRecord>& records);
void write_summary_csv(const std::string& path,
                       const std::vector<TrialRecord>& records);
std::string summary_path_for(const std::string& trials_path);

std::vector<TrialRecord> run_init_closeness(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_phase_transition(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_init_comparison(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_bench_init(const ExperimentConfig& cfg);

struct ImageRunResult {
  std::vector<TrialRecord> records;
  std::vector<std::string> recovered_paths;
};

/// Recovers each color channel of a P3 image independently from quadratic
/// measurements at every m/n in the grid and writes the magnitude images.
/// `out_image_path` may be empty to skip writing.
ImageRunResult run_image_recovery(const std::string& image_path,
                                  const ExperimentConfig& cfg,
                                  const std::string& out_image_path);

/// Trial signal: iid standard complex Gaussian entries, normalized and
/// rescaled so that ||x||_2 = sqrt(n).
CVec draw_signal(Index n, std::uint64_t seed);

}  // namespace quadrec
