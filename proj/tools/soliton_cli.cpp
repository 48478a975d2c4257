#include "soliton/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Gradient Ricci solitons conformal to pseudo-Euclidean space"};
  app.require_subcommand(1);

  soliton::VerifyOverrides overrides;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  auto* opt_threshold = app.add_option("--threshold", threshold, "Scaled residual threshold for verify")
                            ->check(CLI::PositiveNumber);
  auto* opt_seed = app.add_option("--seed", seed, "Sampling seed for verify");
  auto* opt_points = app.add_option("--points", points, "Number of verification points")
                         ->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string config;
  std::string profile;
  auto* solve = app.add_subcommand("solve", "Integrate a configured problem, write CSV profile and JSON summary");
  solve->add_option("config", config, "Problem config (JSON)")->required();

  auto* verify = app.add_subcommand("verify", "Check a profile against the full soliton system");
  verify->add_option("config", config, "Problem config (JSON)")->required();
  verify->add_option("profile", profile, "Profile CSV")->required();

  auto* gal = app.add_subcommand("gallery", "Closed-form solutions");
  gal->require_subcommand(1);
  gal->add_subcommand("list", "List built-in entries");
  auto* emit = gal->add_subcommand("emit", "Write config, profile and summary for an entry");
  std::string name;
  std::string out_dir = ".";
  emit->add_option("name", name, "Entry name")->required();
  emit->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : soliton::kExitError;
  }

  if (*opt_threshold) overrides.threshold = threshold;
  if (*opt_seed) overrides.seed = seed;
  if (*opt_points) overrides.points = points;

  if (*solve) return soliton::cmd_solve(config, std::cout, std::cerr);
  if (*verify) return soliton::cmd_verify(config, profile, overrides, std::cout, std::cerr);
  if (*emit) return soliton::cmd_gallery_emit(name, out_dir, std::cout, std::cerr);
  return soliton::cmd_gallery_list(std::cout);
}
