#pragma once

// The quadric reduction variable xi(x) = Sum_k (tau eps_k x_k^2 + alpha_k x_k + beta_k)
// and the tools to test whether an arbitrary field xi has that shape.

#include "soliton/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace soliton {

/// Quadric ansatz parameters. The outer reparametrization of xi is fixed to the
/// identity; any other choice is absorbed into phi(xi) and f(xi).
class QuadricAnsatz {
 public:
  /// Throws DegenerateAnsatz when tau == 0 and alpha == 0 (xi would be constant).
  QuadricAnsatz(Signature sig, double tau, Vector alpha, Vector beta);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t dim() const noexcept { return sig_.dim(); }
  double tau() const noexcept { return tau_; }
  const Vector& alpha() const noexcept { return alpha_; }
  const Vector& beta() const noexcept { return beta_; }

  /// Only Sum beta_k enters xi; stores it in beta_1 and zeros the rest.
  QuadricAnsatz canonical() const;

  double xi(const Point& x) const;
  ScalarJet2 xi_jet(const Point& x) const;

  /// Lambda = Sum_k (eps_k alpha_k^2 - 4 tau beta_k). Satisfies
  /// Sum_k eps_k xi_,k^2 = 4 tau xi + Lambda at every point.
  double lambda_constant() const;

  /// 4 tau xi + Lambda; the reduced equation degenerates where this vanishes.
  double singular_factor(double xi_value) const { return 4.0 * tau_ * xi_value + lambda_constant(); }

 private:
  Signature sig_;
  double tau_;
  Vector alpha_;
  Vector beta_;
};

enum class InvarianceKind { Translational, PseudoRotational };

/// Symmetry group of the level sets of xi.
struct InvarianceClass {
  InvarianceKind kind;
  /// Translational: the normal data alpha. PseudoRotational: center c_k = -eps_k alpha_k / (2 tau).
  Vector direction;
  Vector center;
  /// Translational only: sign of Lambda = |alpha|_eps^2 (causal character of the normal).
  int causal_sign = 0;
};

InvarianceClass classify(const QuadricAnsatz& a);

/// Field supplying exact 2-jets of a candidate reduction variable.
using JetField = std::function<ScalarJet2(const Point&)>;

/// Ratios xi_,ij / (xi_,i xi_,j) for i != j (diagonal left 0). Throws DivisionByZero
/// when some |xi_,i| < 1e-12.
Matrix derivative_ratio_matrix(const ScalarJet2& xi);

/// Largest spread between off-diagonal entries of derivative_ratio_matrix.
double ratio_spread(const Matrix& ratios);

/// Least-squares (tau, alpha) such that xi_,i / (2 tau eps_i x_i + alpha_i) is independent of i.
struct GeneratorFit {
  double tau = 0.0;
  Vector alpha;
  /// Smallest over largest singular value of the stacked pair system.
  double normalized_residual = 0.0;
};

GeneratorFit fit_quadric_generator(const JetField& xi, const Signature& sig,
                                   std::span<const Point> points);

/// d_i = xi_,i / (2 tau eps_i x_i + alpha_i) - xi_,1 / (2 tau eps_1 x_1 + alpha_1).
/// Throws DivisionByZero on a vanishing denominator or first partial.
Vector generator_deviations(const ScalarJet2& xi, const Point& x, const Signature& sig,
                            const GeneratorFit& fit);

struct AdmissibilityResult {
  Matrix ratios;
  Vector deviations;
  GeneratorFit fit;
  bool admissible = false;
};

/// Default decision threshold on the fit residual and on the scaled deviations.
inline constexpr double kAdmissibilityThreshold = 1e-8;

/// Fits (tau, alpha) over `fit_points` (at least n + 1) and evaluates both tests at `x`.
AdmissibilityResult admissibility_residual(const JetField& xi, const Signature& sig, const Point& x,
                                           std::span<const Point> fit_points,
                                           double threshold = kAdmissibilityThreshold);

}  // namespace soliton
