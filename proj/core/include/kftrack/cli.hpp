#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kftrack::cli {

namespace fs = std::filesystem;

/// Process exit codes shared by every command.
enum ExitCode : int { kOk = 0, kPartialFailure = 1, kInputError = 2 };

struct SimulateOptions {
  fs::path scenario;
  fs::path out_dir;
  std::optional<std::uint64_t> seed;
};

enum class AblationKind { kNone, kModules, kAlpha };

struct TrackOptions {
  fs::path config;
  std::vector<std::uint64_t> seeds;  // overrides the config's seeds when non-empty
  std::optional<fs::path> out_dir;    // overrides the config's out_dir
  AblationKind ablate = AblationKind::kNone;
  std::vector<double> alphas = {0.0, 0.15, 0.25, 0.5, 1.0};
  unsigned jobs = 1;
  bool timing = false;
};

struct EvalOptions {
  fs::path results_dir;
  fs::path gt_dir;
  std::optional<fs::path> out_dir;
  bool emit_plots = false;
};

struct AblateOptions {
  fs::path config;
  std::vector<std::uint64_t> seeds;
  std::optional<fs::path> out_dir;
  AblationKind kind = AblationKind::kModules;
  std::vector<double> alphas = {0.0, 0.15, 0.25, 0.5, 1.0};
  unsigned jobs = 1;
};

struct ReportOptions {
  fs::path dir;
  bool emit_plots = false;
};

struct SuiteOptions {
  std::string suite;  // crossing | fast | poisoning | crossing-demo
  std::size_t count = 0;
  std::uint64_t seed = 2024;
  fs::path out_dir;
};

AblationKind ablation_kind_from_string(const std::string& s);

/// Each command reports progress on `out`, diagnostics on `err`, and returns
/// an ExitCode.
int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int run_track(const TrackOptions& opt, std::ostream& out, std::ostream& err);
int run_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int run_ablate(const AblateOptions& opt, std::ostream& out, std::ostream& err);
int run_report(const ReportOptions& opt, std::ostream& out, std::ostream& err);
int run_make_suite(const SuiteOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace kftrack::cli
