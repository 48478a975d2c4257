#pragma once

// Curvature of the conformally flat metric gbar = g / phi^2 over the flat
// pseudo-Euclidean background g = diag(eps). All quantities are evaluated at a
// single point from exact jets of phi (and f); nothing here differentiates
// numerically.

#include "soliton/types.hpp"

#include <cstddef>

namespace soliton {

/// |phi| below this makes 1/phi^2 meaningless in double precision.
inline constexpr double kTolPhi = 1e-12;

/// Christoffel symbol Gamma^k_ij of gbar (0-based indices).
double conformal_christoffel(const Signature& sig, const ScalarJet2& phi, std::size_t i,
                             std::size_t j, std::size_t k);

/// gbar_ij = eps_i delta_ij / phi^2.
SymTensor2 conformal_metric(const Signature& sig, const ScalarJet2& phi);

/// Ric_gbar = (1/phi^2) { (n-2) phi Hess_g(phi) + [phi Lap_g(phi) - (n-1)|grad phi|_g^2] g }.
SymTensor2 conformal_ricci(const Signature& sig, const ScalarJet2& phi);

/// Hess_gbar(f)_ij = f_,ij - Sum_k Gamma^k_ij f_,k.
SymTensor2 conformal_hessian(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f);

/// R_gbar = Sum_k eps_k [2(n-1) phi phi_,kk - n(n-1) phi_,k^2].
double scalar_curvature(const Signature& sig, const ScalarJet2& phi);

/// Lap_gbar f = Sum_k eps_k [phi^2 f_,kk - (n-2) phi phi_,k f_,k].
double laplacian(const Signature& sig, const ScalarJet2& phi, const ScalarJet2& f);

}  // namespace soliton
