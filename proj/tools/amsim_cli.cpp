// Command-line front end: single trials, seed batches, and batch reports.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amsim/harness.hpp"
#include "amsim/scenario.hpp"

namespace {

// Seed specs: "7", "0..9" (inclusive), or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    const std::uint64_t a = std::stoull(spec.substr(0, range_pos));
    const std::uint64_t b = std::stoull(spec.substr(range_pos + 2));
    if (b < a) throw CLI::ValidationError("--seeds", "range end before start");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    seeds.push_back(std::stoull(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aerial-manipulator flower-targeting simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string in_dir;
  std::uint64_t seed = 0;
  std::string seeds_spec;
  double duration = -1.0;
  int threads = -1;
  double min_success = 0.8;
  bool trace_detections = false;
  bool mppi_diag = false;

  auto* sim = app.add_subcommand("simulate", "run one seeded trial");
  sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--duration", duration, "override sim duration [s]");
  sim->add_option("--threads", threads, "rollout threads (0 = auto)");
  sim->add_flag("--trace-detections", trace_detections, "write detection trace CSV");
  sim->add_flag("--mppi-diag", mppi_diag, "write per-step controller diagnostics CSV");

  auto* batch = app.add_subcommand("batch", "run a batch of seeds");
  batch->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  batch->add_option("--seeds", seeds_spec, "seeds: n, n..m, or comma list")->required();
  batch->add_option("--out", out_dir, "output directory");
  batch->add_option("--duration", duration, "override sim duration [s]");
  batch->add_option("--threads", threads, "rollout threads (0 = auto)");
  batch->add_option("--min-success", min_success, "success-rate needed for exit code 0");

  auto* rep = app.add_subcommand("report", "summarize a batch directory");
  rep->add_option("--in", in_dir, "batch output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      amsim::Scenario sc = amsim::load_scenario(scenario_path);
      if (duration > 0.0) sc.sim.duration_s = duration;
      amsim::RunOptions opts;
      opts.threads_override = threads;
      opts.write_detection_trace = trace_detections;
      opts.write_mppi_diag = mppi_diag;
      const amsim::TrialResult r = amsim::run_trial(sc, seed, out_dir, opts);
      std::cout << "seed " << r.seed << ": " << amsim::to_string(r.outcome);
      if (r.outcome == amsim::TrialOutcome::Done) {
        std::cout << " in " << r.time_to_done_s << " s";
      }
      std::cout << ", final end-effector error " << r.final_ee_error_m
                << " m (min " << r.min_ee_error_m << " m)\n"
                << "trajectory: " << r.trajectory_path << "\n";
      return r.outcome == amsim::TrialOutcome::Done ? 0 : 1;
    }

    if (batch->parsed()) {
      amsim::Scenario sc = amsim::load_scenario(scenario_path);
      if (duration > 0.0) sc.sim.duration_s = duration;
      amsim::RunOptions opts;
      opts.threads_override = threads;
      const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);
      const amsim::BatchReport r = amsim::run_batch(sc, seeds, out_dir, opts);
      std::cout << "batch of " << r.trials.size() << ": success rate "
                << r.success_rate << ", report: " << (out_dir + "/report.json")
                << "\n";
      return r.success_rate >= min_success ? 0 : 1;
    }

    if (rep->parsed()) {
      amsim::report_batch(in_dir, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
