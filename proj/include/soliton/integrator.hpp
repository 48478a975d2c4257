#pragma once

// Dormand-Prince 5(4) integration with Hairer's 4th-order continuous extension
// and sign-change event location on the dense output.

#include "soliton/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace soliton {

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class EventKind { PhiZero, HZero, SingularLocus, FieldBlowup };

std::string event_name(EventKind kind);

/// A stop condition: integration halts where `margin` reaches zero. The margin
/// must be positive at the initial point.
struct EventCondition {
  EventKind kind;
  std::function<double(double t, std::span<const double> y)> margin;
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// <= 0 selects |t1 - t0| / 200.
  double max_step = 0.0;
  std::size_t max_steps = 1'000'000;
  /// Event roots are bracketed to this width in t.
  double event_tol = 1e-12;
};

struct Termination {
  bool completed = true;
  std::optional<EventKind> event;
  double t_stop = 0.0;
};

/// Piecewise dense solution. Immutable once built; evaluation at a stored node
/// returns the stored state bit for bit.
class DenseSolution {
 public:
  std::size_t state_size() const noexcept { return dim_; }
  const std::vector<double>& nodes() const noexcept { return t_; }
  std::span<const double> state(std::size_t node) const;
  const Termination& termination() const noexcept { return term_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  double t_min() const;
  double t_max() const;
  bool contains(double t) const { return t >= t_min() && t <= t_max(); }

  /// Throws OutOfDomain outside [t_min, t_max].
  void evaluate(double t, std::span<double> out) const;
  std::vector<double> evaluate(double t) const;

 private:
  friend struct DenseSolutionBuilder;

  std::size_t dim_ = 0;
  std::vector<double> t_;
  std::vector<double> y_;      // node states, row-major
  std::vector<double> coef_;   // 5 * dim_ coefficients per segment
  std::vector<double> h_;      // full step length of each segment
  Termination term_;
  std::size_t rejected_ = 0;
};

/// Adaptive integration from t0 towards t1 (either direction). Throws
/// EventAtStart, StepSizeUnderflow.
DenseSolution integrate(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                        const StepControl& control = {},
                        const std::vector<EventCondition>& events = {});

/// Fixed-step Dormand-Prince (5th-order solution) over [t0, t1] with `steps` steps.
std::vector<double> integrate_fixed(const OdeRhs& rhs, std::span<const double> y0, double t0,
                                    double t1, std::size_t steps);

struct ConvergenceEstimate {
  double order = 0.0;
  bool skipped = false;
  std::string notice;
};

/// Observed order from runs with N, 2N, 4N fixed steps:
/// log2(|y_N - y_2N| / |y_2N - y_4N|). Skipped when the differences sit at the
/// rounding floor (the scheme is exact for the problem).
ConvergenceEstimate convergence_order(const OdeRhs& rhs, std::span<const double> y0, double t0,
                                      double t1, std::size_t base_steps = 16);

}  // namespace soliton
