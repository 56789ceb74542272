#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/cli/config.hpp"
#include "qwalk/continuous_walk.hpp"
#include "qwalk/decoherence.hpp"
#include "qwalk/stats.hpp"

namespace qwalk::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O and anything unexpected
  kExitConfig = 2,
  kExitInvariant = 3,
};

struct RunResult {
  Distribution distribution;
  nlohmann::json summary;
  std::vector<ExitSample> exit_series;    // continuous walk on glued trees
  std::vector<MeasurementEvent> record;   // first trajectory in trajectory mode
};

// Validates, then computes. No files are touched.
RunResult simulate(const WalkConfig& c);

// Paths written next to the main output.
std::filesystem::path summary_path(const std::filesystem::path& output);
std::filesystem::path meta_path(const std::filesystem::path& output);

// Distribution file, summary, metadata, and the exit series or measurement
// record when present.
void write_run(const WalkConfig& c, const RunResult& r, double wall_seconds);

// Runs fn and maps exceptions to exit codes, printing the message to log.
int guarded(std::ostream& log, const std::function<int()>& fn);

int run_walk(const WalkConfig& c, std::ostream& log);

// Axis: p, steps, size or depth. Value k runs with seed + k.
int run_sweep(const WalkConfig& c, const std::string& axis, const std::vector<std::string>& values,
              std::ostream& log);

// Step-by-step amplitudes of the coined walk on the line from the origin.
// Ket form by default, CSV rows "t,stage,x,coin,re,im" when csv is set.
int run_trace(int steps, const WalkConfig& c, bool csv, std::ostream& out, std::ostream& log);

// which: fig1, fig3 or all.
int run_figures(const std::string& which, const std::filesystem::path& dir, unsigned threads,
                std::ostream& log);

}  // namespace qwalk::cli
