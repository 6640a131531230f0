#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amsim/scenario.hpp"

namespace amsim {

enum class TrialOutcome { Done, Failed, Diverged };

const char* to_string(TrialOutcome o);

struct TrialResult {
  std::uint64_t seed = 0;
  TrialOutcome outcome = TrialOutcome::Failed;
  double time_to_done_s = -1.0;        // <0 unless outcome == Done
  double final_ee_error_m = 0.0;       // against the true target
  double min_ee_error_m = 0.0;
  double align_rms_error_m = -1.0;     // UAV position RMS while in Align; <0 if never aligned
  std::string trajectory_path;
};

struct RunOptions {
  bool write_detection_trace = false;
  bool write_mppi_diag = false;
  int threads_override = -1;           // <0 keeps the scenario's setting
};

// Closed-loop trial: perception at the camera rate, mission and controller
// at the control rate, servo and RK4 at the physics rate, until the mission
// reaches Done/Failed or the configured duration runs out. Writes
// trajectory_seed<seed>.csv and transitions_seed<seed>.csv under out_dir.
// (scenario, seed) fully determines every output byte.
TrialResult run_trial(const Scenario& sc, std::uint64_t seed,
                      const std::filesystem::path& out_dir,
                      const RunOptions& opts = {});

struct BatchReport {
  std::vector<TrialResult> trials;
  double success_rate = 0.0;
  double median_time_to_done_s = -1.0;   // over Done trials
  double final_error_p50_m = -1.0;
  double final_error_p90_m = -1.0;
};

// Run every seed and aggregate; per-trial failures are recorded, not fatal.
// Writes report.json under out_dir. Throws ValidationError on an empty seed
// list.
BatchReport run_batch(const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir,
                      const RunOptions& opts = {});

BatchReport read_report(const std::filesystem::path& dir);

// Print a human-readable summary of a batch directory and write per-trial
// approach-trajectory extracts (extract_seed<seed>.csv). Returns the number
// of malformed trajectory rows skipped across all files.
int report_batch(const std::filesystem::path& dir, std::ostream& out);

}  // namespace amsim
