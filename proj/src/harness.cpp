#include "quadrec/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quadrec/linalg.hpp"
#include "quadrec/parallel.hpp"
#include "quadrec/ppm.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/spectral.hpp"
#include "quadrec/verify.hpp"

namespace quadrec {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
             Clock::now() - t0)
      .count();
}

namespace seed_tag {
constexpr std::uint64_t ensemble = 1;
constexpr std::uint64_t signal = 2;
constexpr std::uint64_t random_init = 3;
}  // namespace seed_tag

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t a,
                         std::uint64_t b, std::uint64_t t) {
  return derive_seed(cfg.base_seed,
                     {static_cast<std::uint64_t>(cfg.kind), a, b, t});
}

Index measurements_for(double m_over_n, Index n) {
  const Index m = static_cast<Index>(std::lround(m_over_n * static_cast<double>(n)));
  return std::max<Index>(m, 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// Shared trial body for the solver-based experiments.
struct SolvedTrial {
  double init_rel = 0.0;
  double final_rel = 0.0;
  int iters = 0;
  Termination termination = Termination::max_iters;
  RecoveryResult result;
};

SolvedTrial solve_trial(const ExperimentConfig& cfg, const CVec& x,
                        const MeasurementEnsemble& ens, const CVec& z0,
                        double R, bool want_trajectory = false) {
  SolvedTrial out;
  const double xnorm = x.norm();
  out.init_rel = aligned_distance(z0, x).distance / xnorm;

  SolverConfig scfg;
  scfg.step_scale = cfg.solver.step_scale;
  scfg.norm_sq_estimate = std::sqrt(R);
  scfg.max_iters = cfg.solver.max_iters;
  scfg.succ_tol = cfg.solver.succ_tol;
  scfg.stop_mode = cfg.solver.stop_mode;
  scfg.record_trajectory = want_trajectory;

  out.result = wf_run(z0, ens, scfg, x);
  out.final_rel = aligned_distance(out.result.z_final, x).distance / xnorm;
  out.iters = out.result.iters;
  out.termination = out.result.termination;
  return out;
}

std::string termination_name(Termination t) {
  return t == Termination::tolerance_met ? "tolerance_met" : "max_iters";
}

void maybe_write_reports(const ExperimentConfig& cfg,
                         const std::vector<TrialRecord>& records) {
  if (cfg.output_path.empty()) return;
  write_trials_csv(cfg.output_path, records);
  write_summary_csv(summary_path_for(cfg.output_path), records);
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::init_closeness: return "init_closeness";
    case ExperimentKind::phase_transition: return "phase_transition";
    case ExperimentKind::image_recovery: return "image_recovery";
    case ExperimentKind::init_comparison: return "init_comparison";
    case ExperimentKind::bench_init: return "bench_init";
  }
  throw std::logic_error("kind_name: unknown kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  for (auto kind : {ExperimentKind::init_closeness, ExperimentKind::phase_transition,
                    ExperimentKind::image_recovery, ExperimentKind::init_comparison,
                    ExperimentKind::bench_init})
    if (kind_name(kind) == name) return kind;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
  if (m_over_n_grid.empty())
    throw std::invalid_argument("ExperimentConfig: m_over_n_grid is empty");
  for (double mn : m_over_n_grid)
    if (!(mn > 0.0))
      throw std::invalid_argument("ExperimentConfig: m/n values must be > 0");
  if (q_values.empty())
    throw std::invalid_argument("ExperimentConfig: q_values is empty");
  for (double q : q_values)
    if (!(q >= -1.0 && q <= 0.0))
      throw std::domain_error("ExperimentConfig: q must lie in [-1, 0]");
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (!(success_tol > 0.0))
    throw std::invalid_argument("ExperimentConfig: success_tol must be > 0");
  if (power_iters < 1)
    throw std::invalid_argument("ExperimentConfig: power_iters must be >= 1");
  for (Index g : n_grid)
    if (g < 1) throw std::invalid_argument("ExperimentConfig: n_grid entries must be >= 1");
}

std::vector<Index> ExperimentConfig::effective_n_grid() const {
  return n_grid.empty() ? std::vector<Index>{n} : n_grid;
}

ExperimentConfig default_config(ExperimentKind kind, bool full_scale) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.n = full_scale ? 100 : 64;
  cfg.trials = full_scale ? 100 : 20;
  cfg.output_path = kind_name(kind) + ".csv";
  switch (kind) {
    case ExperimentKind::init_closeness:
      cfg.m_over_n_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.q_values = {-1.0, -0.5, 0.0};
      break;
    case ExperimentKind::phase_transition:
      if (full_scale) {
        cfg.m_over_n_grid = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
        cfg.q_values = {-1.0, -0.5, 0.0};
      } else {
        cfg.m_over_n_grid = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
        cfg.q_values = {0.0};
      }
      break;
    case ExperimentKind::image_recovery:
      cfg.m_over_n_grid = full_scale ? std::vector<double>{1, 2, 3, 4}
                                     : std::vector<double>{4, 1};
      cfg.q_values = {0.0};
      cfg.trials = 1;
      // Successive-iterate stopping for images uses the plain distance.
      cfg.solver.stop_mode = SolverConfig::StopMode::absolute;
      break;
    case ExperimentKind::init_comparison:
      if (full_scale) {
        cfg.m_over_n_grid = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9,
                             2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
      } else {
        cfg.m_over_n_grid = {1.2, 1.4, 1.6, 1.8, 2.0, 3.0};
      }
      cfg.q_values = {0.0};
      break;
    case ExperimentKind::bench_init:
      // The reference table sweeps n into the tens of thousands; those sizes
      // need hundreds of gigabytes of ensemble draws, so the grid stays at
      // workstation scale and full runs just add trials.
      cfg.n_grid = {500, 1000, 2000};
      cfg.m_over_n_grid = {4.0};
      cfg.q_values = {0.0};
      cfg.trials = full_scale ? 5 : 3;
      break;
  }
  return cfg;
}

namespace {

SolverConfig::StopMode stop_mode_from_name(const std::string& name) {
  if (name == "relative") return SolverConfig::StopMode::relative;
  if (name == "absolute") return SolverConfig::StopMode::absolute;
  throw std::invalid_argument("unknown stop_mode: " + name);
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text,
                                       ExperimentKind kind, bool full_scale) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("kind") && kind_from_name(j.at("kind")) != kind)
    throw std::invalid_argument("config kind '" + std::string(j.at("kind")) +
                                "' does not match the requested experiment");
  ExperimentConfig cfg = default_config(kind, full_scale);
  if (j.contains("n")) j.at("n").get_to(cfg.n);
  if (j.contains("n_grid")) j.at("n_grid").get_to(cfg.n_grid);
  if (j.contains("m_over_n_grid")) j.at("m_over_n_grid").get_to(cfg.m_over_n_grid);
  if (j.contains("q_values")) j.at("q_values").get_to(cfg.q_values);
  if (j.contains("trials")) j.at("trials").get_to(cfg.trials);
  if (j.contains("base_seed")) j.at("base_seed").get_to(cfg.base_seed);
  if (j.contains("success_tol")) j.at("success_tol").get_to(cfg.success_tol);
  if (j.contains("output_path")) j.at("output_path").get_to(cfg.output_path);
  if (j.contains("power_iters")) j.at("power_iters").get_to(cfg.power_iters);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (s.contains("step_scale")) s.at("step_scale").get_to(cfg.solver.step_scale);
    if (s.contains("max_iters")) s.at("max_iters").get_to(cfg.solver.max_iters);
    if (s.contains("succ_tol")) s.at("succ_tol").get_to(cfg.solver.succ_tol);
    if (s.contains("stop_mode"))
      cfg.solver.stop_mode = stop_mode_from_name(s.at("stop_mode"));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind,
                             bool full_scale) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), kind, full_scale);
}

CVec draw_signal(Index n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  NormalSampler normal(eng);
  CVec x(n);
  for (Index k = 0; k < n; ++k)
    x(k) = Complex(normal(), normal()) / std::numbers::sqrt2;
  const double norm = x.norm();
  if (norm == 0.0) return draw_signal(n, splitmix64(seed));
  x *= std::sqrt(static_cast<double>(n)) / norm;
  return x;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kTrialHeader =
    "schema_version,kind,variant,q,m_over_n,n,m,trial,seed,init_rel_distance,"
    "final_rel_distance,final_rel_error,iters,termination,success,wall_time_ms";
}

void write_trials_csv(const std::string& path,
                      const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << kTrialHeader << '\n';
  for (const auto& r : records) {
    out << 1 << ',' << kind_name(r.kind) << ',' << r.variant << ','
        << format_double(r.q) << ',' << format_double(r.m_over_n) << ',' << r.n
        << ',' << r.m << ',' << r.trial << ',' << r.seed << ','
        << cell(r.init_rel_distance) << ',' << cell(r.final_rel_distance) << ','
        << cell(r.final_rel_error) << ','
        << (r.iters ? std::to_string(*r.iters) : std::string()) << ','
        << (r.termination ? *r.termination : std::string()) << ','
        << (r.success ? (*r.success ? "1" : "0") : "") << ','
        << format_double(r.wall_time_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for: " + path);
}

void write_summary_csv(const std::string& path,
                       const std::vector<TrialRecord>& records) {
  struct Agg {
    int trials = 0;
    double init_sum = 0.0;
    int init_count = 0;
    double final_sum = 0.0;
    int final_count = 0;
    double err_sum = 0.0;
    int err_count = 0;
    int success_count = 0;
    int success_total = 0;
    double iters_sum = 0.0;
    int iters_count = 0;
    double wall_sum = 0.0;
  };
  // Key preserves first-seen order so reruns emit identical row order.
  std::vector<std::pair<std::string, Agg>> groups;
  auto find = [&](const std::string& key) -> Agg& {
    for (auto& [k, v] : groups)
      if (k == key) return v;
    groups.emplace_back(key, Agg{});
    return groups.back().second;
  };
  for (const auto& r : records) {
    std::ostringstream key;
    key << kind_name(r.kind) << ',' << r.variant << ',' << format_double(r.q)
        << ',' << format_double(r.m_over_n) << ',' << r.n << ',' << r.m;
    Agg& a = find(key.str());
    a.trials += 1;
    if (r.init_rel_distance) { a.init_sum += *r.init_rel_distance; a.init_count += 1; }
    if (r.final_rel_distance) { a.final_sum += *r.final_rel_distance; a.final_count += 1; }
    if (r.final_rel_error) { a.err_sum += *r.final_rel_error; a.err_count += 1; }
    if (r.success) { a.success_total += 1; a.success_count += *r.success ? 1 : 0; }
    if (r.iters) { a.iters_sum += *r.iters; a.iters_count += 1; }
    a.wall_sum += r.wall_time_ms;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "schema_version,kind,variant,q,m_over_n,n,m,trials,"
         "mean_init_rel_distance,mean_final_rel_distance,mean_final_rel_error,"
         "success_rate,mean_iters,mean_wall_time_ms\n";
  for (const auto& [key, a] : groups) {
    out << 1 << ',' << key << ',' << a.trials << ','
        << (a.init_count ? format_double(a.init_sum / a.init_count) : "") << ','
        << (a.final_count ? format_double(a.final_sum / a.final_count) : "") << ','
        << (a.err_count ? format_double(a.err_sum / a.err_count) : "") << ','
        << (a.success_total ? format_double(double(a.success_count) / a.success_total) : "")
        << ',' << (a.iters_count ? format_double(a.iters_sum / a.iters_count) : "")
        << ',' << format_double(a.wall_sum / a.trials) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for: " + path);
}

std::string summary_path_for(const std::string& trials_path) {
  const auto dot = trials_path.rfind('.');
  const auto slash = trials_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return trials_path + "_summary.csv";
  return trials_path.substr(0, dot) + "_summary" + trials_path.substr(dot);
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

std::vector<TrialRecord> run_init_closeness(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const auto& mns = cfg.m_over_n_grid;
  const auto& qs = cfg.q_values;
  const Index total = static_cast<Index>(qs.size() * mns.size()) * cfg.trials;
  std::vector<TrialRecord> records(total);

  parallel_for(total, [&](Index task) {
    const int trial = static_cast<int>(task % cfg.trials);
    const Index celli = task / cfg.trials;
    const std::size_t mi = celli % mns.size();
    const std::size_t qi = celli / mns.size();
    const auto t0 = Clock::now();

    const std::uint64_t seed = trial_seed(cfg, qi, mi, trial);
    const CVec x = draw_signal(n, derive_seed(seed, seed_tag::signal));
    EnsembleSpec spec{n, measurements_for(mns[mi], n), qs[qi],
                      derive_seed(seed, seed_tag::ensemble)};
    const auto ens = build_ensemble(spec, x);

    InitConfig icfg;
    icfg.power_iters = cfg.power_iters;
    const auto init = spectral_initializer(ens, icfg);

    TrialRecord& r = records[task];
    r.kind = cfg.kind;
    r.q = qs[qi];
    r.m_over_n = mns[mi];
    r.n = n;
    r.m = spec.m;
    r.trial = trial;
    r.seed = seed;
    r.init_rel_distance = aligned_distance(init.z0, x).distance / x.norm();
    r.iters = init.iters_used;
    r.wall_time_ms = ms_since(t0);
  });

  maybe_write_reports(cfg, records);
  return records;
}

std::vector<TrialRecord> run_phase_transition(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const auto& mns = cfg.m_over_n_grid;
  const auto& qs = cfg.q_values;
  const Index total = static_cast<Index>(qs.size() * mns.size()) * cfg.trials;
  std::vector<TrialRecord> records(total);

  parallel_for(total, [&](Index task) {
    const int trial = static_cast<int>(task % cfg.trials);
    const Index celli = task / cfg.trials;
    const std::size_t mi = celli % mns.size();
    const std::size_t qi = celli / mns.size();
    const auto t0 = Clock::now();

    const std::uint64_t seed = trial_seed(cfg, qi, mi, trial);
    const CVec x = draw_signal(n, derive_seed(seed, seed_tag::signal));
    EnsembleSpec spec{n, measurements_for(mns[mi], n), qs[qi],
                      derive_seed(seed, seed_tag::ensemble)};
    const auto ens = build_ensemble(spec, x);

    InitConfig icfg;
    icfg.power_iters = cfg.power_iters;
    const auto init = spectral_initializer(ens, icfg);
    const auto solved = solve_trial(cfg, x, ens, init.z0, *init.norm_estimate_R);

    TrialRecord& r = records[task];
    r.kind = cfg.kind;
    r.q = qs[qi];
    r.m_over_n = mns[mi];
    r.n = n;
    r.m = spec.m;
    r.trial = trial;
    r.seed = seed;
    r.init_rel_distance = solved.init_rel;
    r.final_rel_distance = solved.final_rel;
    r.iters = solved.iters;
    r.termination = termination_name(solved.termination);
    r.success = solved.final_rel < cfg.success_tol;
    r.wall_time_ms = ms_since(t0);
  });

  maybe_write_reports(cfg, records);
  return records;
}

std::vector<TrialRecord> run_init_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const auto& mns = cfg.m_over_n_grid;
  const auto& qs = cfg.q_values;
  const Index tasks = static_cast<Index>(qs.size() * mns.size()) * cfg.trials;
  std::vector<TrialRecord> records(2 * tasks);

  parallel_for(tasks, [&](Index task) {
    const int trial = static_cast<int>(task % cfg.trials);
    const Index celli = task / cfg.trials;
    const std::size_t mi = celli % mns.size();
    const std::size_t qi = celli / mns.size();

    const std::uint64_t seed = trial_seed(cfg, qi, mi, trial);
    const CVec x = draw_signal(n, derive_seed(seed, seed_tag::signal));
    EnsembleSpec spec{n, measurements_for(mns[mi], n), qs[qi],
                      derive_seed(seed, seed_tag::ensemble)};
    // Paired comparison: both arms share the ensemble.
    const auto ens = build_ensemble(spec, x);
    const double R = estimate_norm4(ens);

    InitConfig icfg;
    icfg.power_iters = cfg.power_iters;

    // Random arm: complex Gaussian direction scaled to the estimated norm.
    std::mt19937_64 reng(derive_seed(seed, seed_tag::random_init));
    NormalSampler normal(reng);
    CVec zr(n);
    for (Index k = 0; k < n; ++k) zr(k) = Complex(normal(), normal());
    zr *= std::pow(R, 0.25) / zr.norm();

    for (int arm = 0; arm < 2; ++arm) {
      const auto t0 = Clock::now();
      const CVec z0 = arm == 0 ? spectral_initializer(ens, icfg).z0 : zr;
      const auto solved = solve_trial(cfg, x, ens, z0, R);

      TrialRecord& r = records[2 * task + arm];
      r.kind = cfg.kind;
      r.variant = arm == 0 ? "spectral" : "random";
      r.q = qs[qi];
      r.m_over_n = mns[mi];
      r.n = n;
      r.m = spec.m;
      r.trial = trial;
      r.seed = seed;
      r.init_rel_distance = solved.init_rel;
      r.final_rel_distance = solved.final_rel;
      r.iters = solved.iters;
      r.termination = termination_name(solved.termination);
      r.success = solved.final_rel < cfg.success_tol;
      r.wall_time_ms = ms_since(t0);
    }
  });

  maybe_write_reports(cfg, records);
  return records;
}

std::vector<TrialRecord> run_bench_init(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto n_grid = cfg.effective_n_grid();
  const auto& mns = cfg.m_over_n_grid;
  std::vector<TrialRecord> records;
  records.reserve(2 * n_grid.size() * mns.size() * cfg.trials);

  // Sequential over trials; the streamed accumulation parallelizes inside.
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const Index n = n_grid[ni];
    for (std::size_t mi = 0; mi < mns.size(); ++mi) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t seed = trial_seed(cfg, ni, mi, trial);
        const CVec x = draw_signal(n, derive_seed(seed, seed_tag::signal));
        EnsembleSpec spec{n, measurements_for(mns[mi], n), cfg.q_values.front(),
                          derive_seed(seed, seed_tag::ensemble)};
        const auto data = spectral_from_spec(spec, x);
        const double scale = std::pow(data.R, 0.25);
        const double xnorm = x.norm();

        for (int arm = 0; arm < 2; ++arm) {
          // Timed region matches the benchmark scope: the decomposition and
          // the scaling, not the shared ensemble generation.
          const auto t0 = Clock::now();
          CVec z0;
          int iters_used = 0;
          if (arm == 0) {
            z0 = scale * leading_singular_pair_svd(data.S).v;
          } else {
            const auto triple = leading_singular_pair(data.S, cfg.power_iters);
            z0 = scale * triple.v;
            iters_used = triple.iters_used;
          }
          const double wall = ms_since(t0);

          TrialRecord r;
          r.kind = cfg.kind;
          r.variant = arm == 0 ? "svd" : "power";
          r.q = spec.q;
          r.m_over_n = mns[mi];
          r.n = n;
          r.m = spec.m;
          r.trial = trial;
          r.seed = seed;
          r.init_rel_distance = aligned_distance(z0, x).distance / xnorm;
          if (arm == 1) r.iters = iters_used;
          r.wall_time_ms = wall;
          records.push_back(std::move(r));
        }
      }
    }
  }

  maybe_write_reports(cfg, records);
  return records;
}

ImageRunResult run_image_recovery(const std::string& image_path,
                                  const ExperimentConfig& cfg,
                                  const std::string& out_image_path) {
  cfg.validate();
  const PpmImage img = load_ppm(image_path);
  const Index n = img.pixels();
  const double q = cfg.q_values.front();
  static constexpr const char* kChannelNames[3] = {"r", "g", "b"};

  ImageRunResult out;
  for (std::size_t mi = 0; mi < cfg.m_over_n_grid.size(); ++mi) {
    const double mn = cfg.m_over_n_grid[mi];
    PpmImage recovered = img;
    for (int c = 0; c < 3; ++c) {
      const auto t0 = Clock::now();
      const CVec x = img.channels[c].cast<Complex>();
      const double xnorm = x.norm();
      if (xnorm == 0.0)
        throw std::invalid_argument("run_image_recovery: channel " +
                                    std::string(kChannelNames[c]) + " is all zero");

      const std::uint64_t seed = trial_seed(cfg, mi, static_cast<std::uint64_t>(c), 0);
      EnsembleSpec spec{n, measurements_for(mn, n), q,
                        derive_seed(seed, seed_tag::ensemble)};
      const auto ens = build_ensemble(spec, x);

      InitConfig icfg;
      icfg.power_iters = cfg.power_iters;
      const auto init = spectral_initializer(ens, icfg);
      const auto solved = solve_trial(cfg, x, ens, init.z0, *init.norm_estimate_R);

      recovered.channels[c] = solved.result.z_final.cwiseAbs();
      const double rel_err =
          (solved.result.z_final.cwiseAbs() - img.channels[c]).norm() / xnorm;

      TrialRecord r;
      r.kind = cfg.kind;
      r.variant = kChannelNames[c];
      r.q = q;
      r.m_over_n = mn;
      r.n = n;
      r.m = spec.m;
      r.trial = 0;
      r.seed = seed;
      r.init_rel_distance = solved.init_rel;
      r.final_rel_distance = solved.final_rel;
      r.final_rel_error = rel_err;
      r.iters = solved.iters;
      r.termination = termination_name(solved.termination);
      r.success = solved.final_rel < cfg.success_tol;
      r.wall_time_ms = ms_since(t0);
      out.records.push_back(std::move(r));
    }
    if (!out_image_path.empty()) {
      std::string path = out_image_path;
      if (cfg.m_over_n_grid.size() > 1) {
        const auto dot = path.rfind('.');
        const std::string tag = "_mn" + format_double(mn);
        path = dot == std::string::npos ? path + tag
                                        : path.substr(0, dot) + tag + path.substr(dot);
      }
      save_ppm(path, recovered);
      out.recovered_paths.push_back(path);
    }
  }

  maybe_write_reports(cfg, out.records);
  return out;
}

}  // namespace quadrec
