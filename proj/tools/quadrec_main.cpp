#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadrec/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool full = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment config")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_path, "trial CSV output path");
  cmd->add_option("--seed", args.seed, "override base_seed");
  cmd->add_flag("--full", args.full, "paper-scale grids and trial counts");
  cmd->add_option("--threads", args.threads, "worker thread count");
}

quadrec::ExperimentConfig resolve(const CommonArgs& args,
                                  quadrec::ExperimentKind kind) {
  auto cfg = args.config_path.empty()
                 ? quadrec::default_config(kind, args.full)
                 : quadrec::load_config(args.config_path, kind, args.full);
  if (!args.out_path.empty()) cfg.output_path = args.out_path;
  if (args.seed) cfg.base_seed = *args.seed;
  if (args.threads > 0) {
    // parallel helpers read this once per call
    setenv("QUADREC_THREADS", std::to_string(args.threads).c_str(), 1);
  }
  return cfg;
}

void report(const std::vector<quadrec::TrialRecord>& records,
            const quadrec::ExperimentConfig& cfg) {
  std::printf("%zu trial records", records.size());
  if (!cfg.output_path.empty())
    std::printf(" -> %s (summary: %s)", cfg.output_path.c_str(),
                quadrec::summary_path_for(cfg.output_path).c_str());
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal recovery from full-rank random quadratic measurements"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string image_path;
  std::string out_image_path;

  auto* init_closeness =
      app.add_subcommand("init-closeness", "spectral initializer closeness sweep");
  add_common(init_closeness, args);

  auto* phase_transition =
      app.add_subcommand("phase-transition", "recovery success rate vs m/n");
  add_common(phase_transition, args);

  auto* image = app.add_subcommand("image", "recover a P3 image channel-wise");
  add_common(image, args);
  image->add_option("--image", image_path, "input P3 image")
      ->required()
      ->check(CLI::ExistingFile);
  image->add_option("--out-image", out_image_path, "recovered image path");

  auto* init_compare =
      app.add_subcommand("init-compare", "spectral vs random initialization");
  add_common(init_compare, args);

  auto* bench_init =
      app.add_subcommand("bench-init", "full SVD vs power method timing");
  add_common(bench_init, args);

  CLI11_PARSE(app, argc, argv);

  try {
    using quadrec::ExperimentKind;
    if (init_closeness->parsed()) {
      auto cfg = resolve(args, ExperimentKind::init_closeness);
      report(quadrec::run_init_closeness(cfg), cfg);
    } else if (phase_transition->parsed()) {
      auto cfg = resolve(args, ExperimentKind::phase_transition);
      report(quadrec::run_phase_transition(cfg), cfg);
    } else if (image->parsed()) {
      auto cfg = resolve(args, ExperimentKind::image_recovery);
      if (out_image_path.empty() && !cfg.output_path.empty()) {
        out_image_path = quadrec::summary_path_for(cfg.output_path);
        const auto pos = out_image_path.rfind("_summary.csv");
        out_image_path = out_image_path.substr(0, pos) + "_recovered.ppm";
      }
      auto result = quadrec::run_image_recovery(image_path, cfg, out_image_path);
      report(result.records, cfg);
      for (const auto& p : result.recovered_paths)
        std::printf("recovered image -> %s\n", p.c_str());
    } else if (init_compare->parsed()) {
      auto cfg = resolve(args, ExperimentKind::init_comparison);
      report(quadrec::run_init_comparison(cfg), cfg);
    } else if (bench_init->parsed()) {
      auto cfg = resolve(args, ExperimentKind::bench_init);
      report(quadrec::run_bench_init(cfg), cfg);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
