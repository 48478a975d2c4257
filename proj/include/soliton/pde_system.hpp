#pragma once

// Residuals of the gradient soliton system Ric_gbar + Hess_gbar(f) = lambda gbar for
// gbar = g / phi^2, in scalar form and in tensor form.
//
// Exact relation between the two forms (T = tensor residual):
//   phi^2 T_ii = residual_diag(i)
//   phi   T_ij = residual_offdiag(i, j)        (i != j)
//   Sum_i eps_i phi^2 T_ii = residual_trace
// so the diagonal carries a phi^2 factor and the off-diagonal only phi.

#include "soliton/types.hpp"

#include <cstddef>

namespace soliton {

struct PDEResidual {
  Matrix off_diag;  ///< symmetric, zero diagonal
  Vector diag;
  double trace = 0.0;
};

/// (n-2) phi_,ij + phi f_,ij + phi_,i f_,j + phi_,j f_,i, for i != j.
double residual_offdiag(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                        std::size_t i, std::size_t j);

/// phi[(n-2) phi_,ii + phi f_,ii + 2 phi_,i f_,i]
///   + eps_i Sum_k eps_k [phi phi_,kk - (n-1) phi_,k^2 - phi phi_,k f_,k] - eps_i lambda.
double residual_diag(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                     double lambda, std::size_t i);

/// Sum_k eps_k [2(n-1) phi phi_,kk - n(n-1) phi_,k^2 + phi^2 f_,kk - (n-2) phi phi_,k f_,k] - n lambda.
double residual_trace(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                      double lambda);

/// Ric_gbar + Hess_gbar(f) - lambda gbar via the geometry routines.
SymTensor2 residual_soliton_tensor(const Signature& sig, const ScalarJet2& phi,
                                   const ScalarJet2& f, double lambda);

PDEResidual evaluate_pde(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f,
                         double lambda);

/// Multiplier mapping a tensor-residual entry to the matching scalar residual.
inline double tensor_to_scalar_factor(double phi, std::size_t i, std::size_t j) {
  return i == j ? phi * phi : phi;
}

}  // namespace soliton
