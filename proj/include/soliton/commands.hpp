#pragma once

// The CLI commands as library calls. Each cmd_* returns the process exit code:
// 0 success/pass, 1 verification fail, 2 configuration or solver error.

#include "soliton/config.hpp"
#include "soliton/ode_reduction.hpp"
#include "soliton/profile.hpp"
#include "soliton/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace soliton {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitError = 2;

struct SolveOutcome {
  SolitonProblem problem;
  Profile profile;
  nlohmann::json summary;
};

/// Dispatches on cfg.mode. Solver errors propagate as SolitonError.
SolveOutcome run_solve(const ProblemConfig& cfg);

/// Second-derivative model used to rebuild a profile read from disk.
SecondDerivativeModel model_for(const ProblemConfig& cfg, const SolitonProblem& p);

/// Problem (ansatz and resolved lambda) described by a config.
SolitonProblem problem_for(const ProblemConfig& cfg);

struct VerifyOverrides {
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> points;
};

ResidualReport run_verify(const ProblemConfig& cfg, const Profile& profile,
                          const VerifyOverrides& overrides = {});

int cmd_solve(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& profile,
               const VerifyOverrides& overrides, std::ostream& out, std::ostream& err);
int cmd_gallery_list(std::ostream& out);
/// Writes config.json, profile.csv and summary.json for a built-in entry into out_dir.
int cmd_gallery_emit(const std::string& name, const std::filesystem::path& out_dir,
                     std::ostream& out, std::ostream& err);

}  // namespace soliton
