#pragma once

#include "soliton/integrator.hpp"
#include "soliton/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace soliton {

/// First-order data of a profile at one value of xi.
struct ReducedState {
  double xi = 0.0;
  double phi = 1.0;
  double dphi = 0.0;  ///< d phi / d xi
  double f = 0.0;
  double df = 0.0;    ///< d f / d xi
};

/// Reduced state plus second derivatives.
struct ProfileJet {
  double xi = 0.0;
  double phi = 0.0, dphi = 0.0, ddphi = 0.0;
  double f = 0.0, df = 0.0, ddf = 0.0;
};

/// Supplies (phi'', f'') for first-order data; each solve mode has its own.
using SecondDerivativeModel = std::function<ProfileJet(const ReducedState&)>;

/// Termination record of a profile: completed, or stopped by an event at xi_stop.
struct ProfileTermination {
  bool completed = true;
  std::optional<EventKind> event;
  double xi_stop = 0.0;
};

/// A sampled solution phi(xi), f(xi) with evaluation anywhere in its range.
/// Immutable after construction and cheap to copy.
class Profile {
 public:
  using FirstOrder = std::function<ReducedState(double xi)>;

  Profile(std::vector<ReducedState> nodes, FirstOrder first_order, SecondDerivativeModel model,
          ProfileTermination termination);

  /// Quintic Hermite interpolation through tabulated nodes (phi'' and f'' at
  /// nodes come from `model`); phi' and f' at queries are derivatives of the
  /// interpolant. Throws ProfileMalformed for unusable tables.
  static Profile from_table(std::vector<ReducedState> nodes, SecondDerivativeModel model);

  double xi_min() const noexcept { return lo_; }
  double xi_max() const noexcept { return hi_; }
  bool contains(double xi) const noexcept { return xi >= lo_ && xi <= hi_; }

  /// Full jet at xi; throws OutOfDomain outside the range.
  ProfileJet at(double xi) const;
  ReducedState first_order(double xi) const;

  const std::vector<ReducedState>& nodes() const noexcept { return *nodes_; }
  const ProfileTermination& termination() const noexcept { return term_; }
  const SecondDerivativeModel& model() const noexcept { return model_; }

  /// Same profile with a different first-order evaluator (for fault injection).
  Profile with_first_order(FirstOrder fo) const;

 private:
  std::shared_ptr<const std::vector<ReducedState>> nodes_;
  FirstOrder first_order_;
  SecondDerivativeModel model_;
  ProfileTermination term_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace soliton
