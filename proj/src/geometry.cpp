#include "soliton/geometry.hpp"

#include <cmath>
#include <string>

namespace soliton {
namespace {

void require_same_dim(const Signature& sig, const ScalarJet2& jet) {
  if (jet.dim() != sig.dim()) {
    throw SolitonError(ErrorCode::InvalidArgument,
                       "jet dimension " + std::to_string(jet.dim()) +
                           " does not match signature dimension " + std::to_string(sig.dim()));
  }
}

void require_nondegenerate(const ScalarJet2& phi) {
  if (!(std::abs(phi.value) >= kTolPhi)) {
    throw SolitonError(ErrorCode::DegenerateConformalFactor,
                       "|phi| = " + std::to_string(std::abs(phi.value)) + " below tolerance");
  }
}

}  // namespace

double conformal_christoffel(const Signature& sig, const ScalarJet2& phi, std::size_t i,
                             std::size_t j, std::size_t k) {
  require_same_dim(sig, phi);
  require_nondegenerate(phi);
  const std::size_t n = sig.dim();
  if (i >= n || j >= n || k >= n) {
    throw SolitonError(ErrorCode::InvalidArgument, "Christoffel index out of range");
  }
  const auto& d = phi.gradient;
  const double p = phi.value;
  if (i == j) {
    if (k == i) return -d[i] / p;
    return sig[i] * sig[k] * d[k] / p;
  }
  if (k == i) return -d[j] / p;
  if (k == j) return -d[i] / p;
  return 0.0;
}

SymTensor2 conformal_metric(const Signature& sig, const ScalarJet2& phi) {
  require_same_dim(sig, phi);
  require_nondegenerate(phi);
  SymTensor2 g(sig.dim());
  const double inv2 = 1.0 / (phi.value * phi.value);
  for (std::size_t i = 0; i < sig.dim(); ++i) g.set(i, i, sig[i] * inv2);
  return g;
}

SymTensor2 conformal_ricci(const Signature& sig, const ScalarJet2& phi) {
  require_same_dim(sig, phi);
  require_nondegenerate(phi);
  const std::size_t n = sig.dim();
  const double nd = static_cast<double>(n);
  const double p = phi.value;

  double lap = 0.0;
  double grad2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    lap += sig[k] * phi.hessian(k, k);
    grad2 += sig[k] * phi.gradient[k] * phi.gradient[k];
  }
  const double trace_part = p * lap - (nd - 1.0) * grad2;
  const double inv2 = 1.0 / (p * p);

  SymTensor2 ric(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = (nd - 2.0) * p * phi.hessian(i, j);
      if (i == j) v += trace_part * sig[i];
      ric.set(i, j, v * inv2);
    }
  }
  return ric;
}

SymTensor2 conformal_hessian(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f) {
  require_same_dim(sig, phi);
  require_same_dim(sig, f);
  require_nondegenerate(phi);
  const std::size_t n = sig.dim();
  SymTensor2 hess(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = f.hessian(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        v -= conformal_christoffel(sig, phi, i, j, k) * f.gradient[k];
      }
      hess.set(i, j, v);
    }
  }
  return hess;
}

double scalar_curvature(const Signature& sig, const ScalarJet2& phi) {
  require_same_dim(sig, phi);
  require_nondegenerate(phi);
  const double nd = static_cast<double>(sig.dim());
  double r = 0.0;
  for (std::size_t k = 0; k < sig.dim(); ++k) {
    const double dk = phi.gradient[k];
    r += sig[k] * (2.0 * (nd - 1.0) * phi.value * phi.hessian(k, k) - nd * (nd - 1.0) * dk * dk);
  }
  return r;
}

double laplacian(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f) {
  require_same_dim(sig, phi);
  require_same_dim(sig, f);
  require_nondegenerate(phi);
  const double nd = static_cast<double>(sig.dim());
  const double p = phi.value;
  double lap = 0.0;
  for (std::size_t k = 0; k < sig.dim(); ++k) {
    lap += sig[k] * (p * p * f.hessian(k, k) - (nd - 2.0) * p * phi.gradient[k] * f.gradient[k]);
  }
  return lap;
}

}  // namespace soliton
