#include "soliton/pde_system.hpp"

#include "soliton/geometry.hpp"

#include <string>

namespace soliton {
namespace {

void check_jets(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f) {
  if (phi.dim() != sig.dim() || f.dim() != sig.dim()) {
    throw SolitonError(ErrorCode::InvalidArgument, "jet dimension does not match signature");
  }
}

}  // namespace

double residual_offdiag(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                        std::size_t i, std::size_t j) {
  check_jets(sig, phi, f);
  if (i == j || i >= sig.dim() || j >= sig.dim()) {
    throw SolitonError(ErrorCode::InvalidArgument, "off-diagonal residual needs i != j in range");
  }
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const double nd = static_cast<double>(sig.dim());
  return (nd - 2.0) * phi.hessian(a, b) + phi.value * f.hessian(a, b) +
         phi.gradient[a] * f.gradient[b] + phi.gradient[b] * f.gradient[a];
}

double residual_diag(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                     double lambda, std::size_t i) {
  check_jets(sig, phi, f);
  if (i >= sig.dim()) {
    throw SolitonError(ErrorCode::InvalidArgument, "diagonal residual index out of range");
  }
  const auto a = static_cast<Eigen::Index>(i);
  const double nd = static_cast<double>(sig.dim());
  const double p = phi.value;
  double sum = 0.0;
  for (std::size_t k = 0; k < sig.dim(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double dk = phi.gradient[kk];
    sum += sig[k] * (p * phi.hessian(kk, kk) - (nd - 1.0) * dk * dk - p * dk * f.gradient[kk]);
  }
  const double own = (nd - 2.0) * phi.hessian(a, a) + p * f.hessian(a, a) +
                     2.0 * phi.gradient[a] * f.gradient[a];
  return p * own + sig[i] * sum - sig[i] * lambda;
}

double residual_trace(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                      double lambda) {
  check_jets(sig, phi, f);
  const double nd = static_cast<double>(sig.dim());
  const double p = phi.value;
  double sum = 0.0;
  for (std::size_t k = 0; k < sig.dim(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double dk = phi.gradient[kk];
    sum += sig[k] * (2.0 * (nd - 1.0) * p * phi.hessian(kk, kk) - nd * (nd - 1.0) * dk * dk +
                     p * p * f.hessian(kk, kk) - (nd - 2.0) * p * dk * f.gradient[kk]);
  }
  return sum - nd * lambda;
}

SymTensor2 residual_soliton_tensor(const Signature& sig, const ScalarJet2& phi,
                                   const ScalarJet2& f, double lambda) {
  check_jets(sig, phi, f);
  SymTensor2 t = conformal_ricci(sig, phi);
  t += conformal_hessian(sig, phi, f);
  t -= lambda * conformal_metric(sig, phi);
  return t;
}

PDEResidual evaluate_pde(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                         double lambda) {
  const std::size_t n = sig.dim();
  const auto m = static_cast<Eigen::Index>(n);
  PDEResidual r;
  r.off_diag = Matrix::Zero(m, m);
  r.diag = Vector(m);
  for (std::size_t i = 0; i < n; ++i) {
    r.diag[static_cast<Eigen::Index>(i)] = residual_diag(sig, phi, f, lambda, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = residual_offdiag(sig, phi, f, i, j);
      r.off_diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      r.off_diag(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  r.trace = residual_trace(sig, phi, f, lambda);
  return r;
}

}  // namespace soliton
