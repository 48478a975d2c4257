#include "soliton/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace soliton {
namespace {

constexpr double kDivisionFloor = 1e-12;

void require_dim(const Signature& sig, const Vector& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != sig.dim()) {
    throw SolitonError(ErrorCode::InvalidArgument,
                       std::string(what) + " has length " + std::to_string(v.size()) +
                           ", expected " + std::to_string(sig.dim()));
  }
}

}  // namespace

QuadricAnsatz::QuadricAnsatz(Signature sig, double tau, Vector alpha, Vector beta)
    : sig_(std::move(sig)), tau_(tau), alpha_(std::move(alpha)), beta_(std::move(beta)) {
  require_dim(sig_, alpha_, "alpha");
  require_dim(sig_, beta_, "beta");
  if (tau_ == 0.0 && alpha_.cwiseAbs().maxCoeff() == 0.0) {
    throw SolitonError(ErrorCode::DegenerateAnsatz, "tau = 0 and alpha = 0 make xi constant");
  }
}

QuadricAnsatz QuadricAnsatz::canonical() const {
  Vector beta = Vector::Zero(beta_.size());
  beta[0] = beta_.sum();
  return QuadricAnsatz(sig_, tau_, alpha_, beta);
}

double QuadricAnsatz::xi(const Point& x) const {
  require_dim(sig_, x, "point");
  double v = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) {
    v += tau_ * sig_[k] * x[k] * x[k] + alpha_[k] * x[k] + beta_[k];
  }
  return v;
}

ScalarJet2 QuadricAnsatz::xi_jet(const Point& x) const {
  const auto n = static_cast<Eigen::Index>(dim());
  Vector grad(n);
  Matrix hess = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double e = sig_[static_cast<std::size_t>(k)];
    grad[k] = 2.0 * tau_ * e * x[k] + alpha_[k];
    hess(k, k) = 2.0 * tau_ * e;
  }
  return ScalarJet2(xi(x), std::move(grad), std::move(hess));
}

double QuadricAnsatz::lambda_constant() const {
  double lam = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) {
    lam += sig_[k] * alpha_[k] * alpha_[k] - 4.0 * tau_ * beta_[k];
  }
  return lam;
}

InvarianceClass classify(const QuadricAnsatz& a) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  InvarianceClass out;
  if (a.tau() == 0.0) {
    out.kind = InvarianceKind::Translational;
    out.direction = a.alpha();
    out.center = Vector::Zero(n);
    const double lam = a.lambda_constant();
    out.causal_sign = lam > 0.0 ? 1 : (lam < 0.0 ? -1 : 0);
    return out;
  }
  out.kind = InvarianceKind::PseudoRotational;
  out.direction = Vector::Zero(n);
  out.center = Vector(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.center[k] = -a.signature()[static_cast<std::size_t>(k)] * a.alpha()[k] / (2.0 * a.tau());
  }
  return out;
}

Matrix derivative_ratio_matrix(const ScalarJet2& xi) {
  const auto n = static_cast<Eigen::Index>(xi.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(xi.gradient[i]) < kDivisionFloor) {
      throw SolitonError(ErrorCode::DivisionByZero,
                         "xi_," + std::to_string(i + 1) + " vanishes; resample the point");
    }
  }
  Matrix r = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) r(i, j) = xi.hessian(i, j) / (xi.gradient[i] * xi.gradient[j]);
    }
  }
  return r;
}

double ratio_spread(const Matrix& ratios) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < ratios.rows(); ++i) {
    for (Eigen::Index j = 0; j < ratios.cols(); ++j) {
      if (i == j) continue;
      lo = std::min(lo, ratios(i, j));
      hi = std::max(hi, ratios(i, j));
    }
  }
  return hi - lo;
}

GeneratorFit fit_quadric_generator(const JetField& xi, const Signature& sig,
                                   std::span<const Point> points) {
  const std::size_t n = sig.dim();
  if (points.size() < n + 1) {
    throw SolitonError(ErrorCode::InvalidArgument, "generator fit needs at least n + 1 points");
  }
  // Unknowns theta = (tau, alpha_1..alpha_n). For each point and pair i < j:
  //   xi_,i (2 tau eps_j x_j + alpha_j) - xi_,j (2 tau eps_i x_i + alpha_i) = 0.
  const auto cols = static_cast<Eigen::Index>(n + 1);
  const auto pairs = static_cast<Eigen::Index>(n * (n - 1) / 2);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(points.size()) * pairs, cols);
  Eigen::Index row = 0;
  for (const Point& x : points) {
    const ScalarJet2 jet = xi(x);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        a(row, 0) = 2.0 * (jet.gradient[ii] * sig[j] * x[jj] - jet.gradient[jj] * sig[i] * x[ii]);
        a(row, 1 + jj) += jet.gradient[ii];
        a(row, 1 + ii) -= jet.gradient[jj];
        const double norm = a.row(row).norm();
        if (norm > 0.0) a.row(row) /= norm;
        ++row;
      }
    }
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Vector theta = svd.matrixV().col(cols - 1);

  GeneratorFit fit;
  fit.tau = theta[0];
  fit.alpha = theta.tail(cols - 1);
  fit.normalized_residual = s[0] > 0.0 ? s[s.size() - 1] / s[0] : 0.0;
  if (s.size() < cols) fit.normalized_residual = 0.0;
  return fit;
}

Vector generator_deviations(const ScalarJet2& xi, const Point& x, const Signature& sig,
                            const GeneratorFit& fit) {
  const auto n = static_cast<Eigen::Index>(sig.dim());
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = 2.0 * fit.tau * sig[static_cast<std::size_t>(i)] * x[i] + fit.alpha[i];
    if (std::abs(denom) < kDivisionFloor || std::abs(xi.gradient[i]) < kDivisionFloor) {
      throw SolitonError(ErrorCode::DivisionByZero,
                         "generator denominator vanishes at coordinate " + std::to_string(i + 1));
    }
    q[i] = xi.gradient[i] / denom;
  }
  return q.array() - q[0];
}

AdmissibilityResult admissibility_residual(const JetField& xi, const Signature& sig, const Point& x,
                                           std::span<const Point> fit_points, double threshold) {
  AdmissibilityResult out;
  const ScalarJet2 jet = xi(x);
  out.ratios = derivative_ratio_matrix(jet);
  out.fit = fit_quadric_generator(xi, sig, fit_points);
  out.deviations = generator_deviations(jet, x, sig, out.fit);

  double ratio_scale = 1.0;
  for (Eigen::Index i = 0; i < out.ratios.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.ratios.cols(); ++j) {
      ratio_scale = std::max(ratio_scale, std::abs(out.ratios(i, j)));
    }
  }
  // Deviations are measured against the size of the common quotient.
  double quotient_scale = 0.0;
  for (Eigen::Index i = 0; i < out.deviations.size(); ++i) {
    const double denom = 2.0 * out.fit.tau * sig[static_cast<std::size_t>(i)] * x[i] + out.fit.alpha[i];
    quotient_scale = std::max(quotient_scale, std::abs(jet.gradient[i] / denom));
  }
  const double dev = out.deviations.cwiseAbs().maxCoeff() / std::max(quotient_scale, 1e-300);

  out.admissible = ratio_spread(out.ratios) <= threshold * ratio_scale &&
                   out.fit.normalized_residual <= threshold && dev <= threshold;
  return out;
}

}  // namespace soliton
