#pragma once

// Certification of profiles against the full soliton system on R^n, and an
// independent finite-difference curvature oracle built from a general metric.

#include "soliton/ode_reduction.hpp"
#include "soliton/profile.hpp"
#include "soliton/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace soliton {

/// Counter-based generator: the k-th draw depends only on (seed, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const;
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

 private:
  std::uint64_t seed_;
};

enum class SampleMode { Grid, Random };

struct SampleSpec {
  SampleMode mode = SampleMode::Random;
  std::uint64_t seed = 0;
  std::size_t count = 500;
  std::vector<std::pair<double, double>> box;
  /// Points with |phi(xi(x))| below this are skipped.
  double min_phi = 1e-6;
  /// Points with |4 tau xi + Lambda| below this are skipped (0 disables).
  double min_singular = 0.0;
};

/// Sample points satisfying the SampleSpec constraints, in generation order.
/// Throws SamplingExhausted when too few candidates qualify.
std::vector<Point> sample_points(const SolitonProblem& p, const Profile& prof, const SampleSpec& spec);

using ScalarField = std::function<double(const Point&)>;

struct FdRicci {
  SymTensor2 ricci;
  /// log2 of successive differences over steps h, h/2, h/4.
  double rate;
};

/// Ricci tensor of gbar_ij = eps_i delta_ij / phi(x)^2 by central differences,
/// assembled through Christoffel symbols of a general metric.
/// Throws StencilOutOfDomain when phi is non-finite or zero on the stencil.
FdRicci fd_curvature_oracle(const Signature& sig, const ScalarField& phi, const Point& x,
                            double step);

/// Ricci tensor at a single step (no rate estimate).
SymTensor2 fd_ricci(const Signature& sig, const ScalarField& phi, const Point& x, double step);

/// Covariant Hessian of f in gbar by central differences.
SymTensor2 fd_hessian(const Signature& sig, const ScalarField& phi, const ScalarField& f,
                      const Point& x, double step);

struct OracleGap {
  double max_gap = 0.0;
  double step = 1e-4;
  double rate = 0.0;
  std::size_t points = 0;
};

struct ResidualReport {
  double max_offdiag = 0.0;
  double max_diag = 0.0;
  double max_trace = 0.0;
  double max_tensor = 0.0;
  double mean_offdiag = 0.0;
  double mean_diag = 0.0;
  double mean_trace = 0.0;
  double mean_tensor = 0.0;
  OracleGap oracle_gap;
  std::size_t points_evaluated = 0;
  double scale = 1.0;
  double threshold = 0.0;
  double oracle_tolerance = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const ResidualReport& r);

struct VerifyOptions {
  double fd_step = 1e-4;
  /// Samples (the first ones generated) that also get the FD oracle.
  std::size_t oracle_points = 8;
  double oracle_tolerance = 1e-5;
};

inline constexpr double kDefaultThreshold = 1e-8;

/// Lifts the profile at every sample and evaluates all residual families.
/// Residuals are divided by max(1, |lambda|, max |phi phi''|); tensor entries
/// are reported as phi^2 T_ij. pass iff every maximum <= threshold and the
/// oracle gap <= options.oracle_tolerance.
ResidualReport verify_profile(const SolitonProblem& p, const Profile& prof, const SampleSpec& spec,
                              double threshold = kDefaultThreshold, const VerifyOptions& options = {});

}  // namespace soliton
