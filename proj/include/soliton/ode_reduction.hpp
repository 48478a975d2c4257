#pragma once

// Reduced ODE systems for phi(xi), f(xi) under the quadric ansatz, their
// integration into profiles, closed-form solutions, and the lift back to jets
// on R^n.

#include "soliton/ansatz.hpp"
#include "soliton/integrator.hpp"
#include "soliton/profile.hpp"
#include "soliton/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace soliton {

/// Reduced equation degenerates where |4 tau xi + Lambda| is at most this.
inline constexpr double kTolSingular = 1e-10;

/// Signature, ansatz and soliton constant. lambda > 0 shrinking, = 0 steady, < 0 expanding.
struct SolitonProblem {
  QuadricAnsatz ansatz;
  double lambda = 0.0;

  const Signature& signature() const noexcept { return ansatz.signature(); }
  std::size_t dim() const noexcept { return ansatz.dim(); }
};

std::string soliton_type(double lambda);

/// Constants of the constrained first-order branch (h = phi^2).
struct SpecialParams {
  double c1 = 0.0;
  double c2 = 0.0;
  double h0 = 1.0;
  double f0 = 0.0;
};

struct ReducedDerivatives {
  double dphi = 0.0;
  double ddphi = 0.0;
  double df = 0.0;
  double ddf = 0.0;
};

/// Solves the reduced pair for (phi'', f''): phi'' from
///   2 tau phi[2(n-1)phi' + phi f'] + [phi phi'' - (n-1)phi'^2 - phi phi' f'](4 tau xi + Lambda) = lambda,
/// then f'' from (n-2)phi'' + phi f'' + 2 phi' f' = 0.
/// Throws NullTranslationDirection (tau = 0, Lambda = 0), SingularLocus, DegenerateConformalFactor.
ReducedDerivatives reduced_rhs(const SolitonProblem& p, const ReducedState& s);

/// h' = [c2(4 tau xi + Lambda) + lambda/(2 tau) - c1 h^{-(n-2)/(n+2)}] / (n-1).
/// Throws RequiresNonzeroTau, NonPositiveH.
double special_rhs(const SolitonProblem& p, const SpecialParams& sp, double xi, double h);

/// f' = c1 h^{-2n/(n+2)} on the constrained branch.
double special_df(std::size_t n, const SpecialParams& sp, double h);

/// Jet of the constrained branch at (xi, h), phi = +sqrt(h), with exact
/// second derivatives obtained by differentiating the first-order relations.
ProfileJet special_jet(const SolitonProblem& p, const SpecialParams& sp, double xi, double h,
                       double f);

/// max over samples of |2n phi'' + phi f''|.
double check_special_constraint(std::size_t n, std::span<const ProfileJet> samples);

/// Residuals of the two reduced equations at a jet (order: first, second).
std::pair<double, double> reduced_equation_residuals(const SolitonProblem& p, const ProfileJet& j);

/// 2 tau phi[2(n-1)phi' + phi f'] - lambda: what remains of the second reduced
/// equation on the singular locus.
double singular_constraint_residual(const SolitonProblem& p, const ReducedState& s);

/// d/dxi [(n-2)phi' + phi f'] along the reduced flow. The locus (n-2)phi' + phi f' = 0
/// is invariant only if this vanishes, which forces phi' f' = 0.
double trivial_locus_drift(const SolitonProblem& p, const ReducedState& s);

SecondDerivativeModel reduced_model(const SolitonProblem& p);
SecondDerivativeModel special_model(const SolitonProblem& p, const SpecialParams& sp);

struct StopConditions {
  double phi_floor = 1e-6;
  double singular_guard = 1e-6;
  double blowup = 1e8;
};

struct IntegrationConfig {
  StepControl control;
  double xi_start = 0.0;
  double xi_end = 1.0;
  StopConditions stops;
};

/// Integrates the reduced system from `initial` (initial.xi is replaced by cfg.xi_start).
Profile solve_reduced(const SolitonProblem& p, const ReducedState& initial,
                      const IntegrationConfig& cfg);

/// Integrates (h, f) of the constrained branch from h(xi_start) = h0, f = f0.
Profile solve_special(const SolitonProblem& p, const SpecialParams& sp,
                      const IntegrationConfig& cfg);

enum class GalleryName { Gaussian, Cigar, SpaceForm, N2Polynomial };

const std::vector<std::string>& gallery_names();
GalleryName parse_gallery_name(const std::string& name);
std::string gallery_name(GalleryName g);

using GalleryParams = std::map<std::string, double>;

struct GallerySolution {
  Profile profile;
  /// Soliton constant of the solution (forced for space forms).
  double lambda;
};

/// Closed-form solutions sampled on `nodes` uniform points of [xi_lo, xi_hi].
/// `lambda` is the requested constant; space forms fix it themselves and
/// reject a conflicting request. Throws InvalidGalleryParams.
GallerySolution gallery(GalleryName name, const GalleryParams& params, const QuadricAnsatz& ansatz,
                        std::optional<double> lambda, double xi_lo, double xi_hi,
                        std::size_t nodes = 2001);

/// lambda = (n-1) b1 (4 tau b2 - b1 Lambda) for phi = b1 xi + b2, f constant.
double space_form_lambda(std::size_t n, double tau, double Lambda, double b1, double b2);

struct LiftedJets {
  ScalarJet2 phi;
  ScalarJet2 f;
};

/// Chain rule: u_,i = u' xi_,i, u_,ij = u'' xi_,i xi_,j + u' xi_,ij.
LiftedJets lift_jet(const QuadricAnsatz& a, const ProfileJet& j, const Point& x);

/// Throws OutOfDomain when xi(x) is outside the profile.
LiftedJets lift(const SolitonProblem& p, const Profile& prof, const Point& x);

}  // namespace soliton
