#pragma once

// JSON problem configuration. Lambda (the ansatz constant) is always derived,
// never read from the file.

#include "soliton/ode_reduction.hpp"
#include "soliton/verify.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace soliton {

enum class SolveMode { Theorem2, Theorem3, Gallery };

struct OutputPaths {
  std::filesystem::path profile;
  std::filesystem::path summary;
  std::filesystem::path report;
};

struct ProblemConfig {
  std::vector<int> epsilon;
  double tau = 0.0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::optional<double> lambda;

  SolveMode mode = SolveMode::Theorem2;
  GalleryName gallery = GalleryName::Gaussian;

  ReducedState initial;   // theorem2
  SpecialParams special;  // theorem3
  GalleryParams params;   // gallery
  std::size_t gallery_nodes = 2001;

  double xi_start = 0.0;
  double xi_end = 1.0;
  StepControl control;
  StopConditions stops;

  SampleSpec sample;
  double threshold = kDefaultThreshold;
  OutputPaths output;

  std::size_t dim() const { return epsilon.size(); }
  QuadricAnsatz ansatz() const;
  std::string mode_string() const;
};

/// Validates and fills defaults. Relative output paths are resolved against
/// `base_dir`. Throws ConfigInvalid listing every offending field.
ProblemConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ProblemConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration (defaults filled, Lambda and lambda included).
nlohmann::json resolved_config_json(const ProblemConfig& cfg, double resolved_lambda);

/// Built-in configuration used by `gallery emit <name>`.
nlohmann::json default_gallery_config(GalleryName name);

}  // namespace soliton
