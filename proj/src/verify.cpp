#include "soliton/verify.hpp"

#include "soliton/geometry.hpp"
#include "soliton/pde_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace soliton {

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  // splitmix64 finalizer over (seed, counter)
  std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::vector<Point> sample_points(const SolitonProblem& p, const Profile& prof,
                                 const SampleSpec& spec) {
  const std::size_t n = p.dim();
  if (spec.box.size() != n) {
    throw SolitonError(ErrorCode::InvalidArgument, "sample box has " + std::to_string(spec.box.size()) +
                                                       " intervals, expected " + std::to_string(n));
  }
  for (const auto& [lo, hi] : spec.box) {
    if (!(hi > lo)) throw SolitonError(ErrorCode::InvalidArgument, "sample box interval is degenerate");
  }
  if (spec.count == 0) throw SolitonError(ErrorCode::InvalidArgument, "sample count must be >= 1");

  auto accept = [&](const Point& x) {
    const double xi = p.ansatz.xi(x);
    if (!prof.contains(xi)) return false;
    if (spec.min_singular > 0.0 && std::abs(p.ansatz.singular_factor(xi)) < spec.min_singular) {
      return false;
    }
    return std::abs(prof.first_order(xi).phi) >= std::max(spec.min_phi, kTolPhi);
  };

  std::vector<Point> out;
  const auto dim = static_cast<Eigen::Index>(n);
  if (spec.mode == SampleMode::Grid) {
    const auto per_axis = static_cast<std::size_t>(
        std::max(2.0, std::ceil(std::pow(static_cast<double>(spec.count), 1.0 / static_cast<double>(n)) - 1e-9)));
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Point x(dim);
      for (std::size_t k = 0; k < n; ++k) {
        const auto [lo, hi] = spec.box[k];
        x[static_cast<Eigen::Index>(k)] =
            lo + (hi - lo) * static_cast<double>(idx[k]) / static_cast<double>(per_axis - 1);
      }
      if (accept(x)) out.push_back(std::move(x));
      std::size_t k = 0;
      while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == n) break;
    }
    if (out.empty()) {
      throw SolitonError(ErrorCode::SamplingExhausted, "no grid point maps into the profile range");
    }
    return out;
  }

  const CounterRng rng(spec.seed);
  const std::size_t max_attempts = 1000 * spec.count;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < spec.count; ++attempt) {
    Point x(dim);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [lo, hi] = spec.box[k];
      x[static_cast<Eigen::Index>(k)] = rng.uniform(attempt * n + k, lo, hi);
    }
    if (accept(x)) out.push_back(std::move(x));
  }
  if (out.size() < spec.count) {
    throw SolitonError(ErrorCode::SamplingExhausted,
                       "only " + std::to_string(out.size()) + " of " + std::to_string(spec.count) +
                           " samples satisfy the constraints");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle. Everything below works with an arbitrary metric
// matrix; the conformal structure is only used to build gbar pointwise.

namespace {

using Christoffels = std::vector<Matrix>;  // [k](i, j)

Matrix metric_at(const Signature& sig, const ScalarField& phi, const Point& x) {
  const double v = phi(x);
  if (!std::isfinite(v) || std::abs(v) < kTolPhi) {
    throw SolitonError(ErrorCode::StencilOutOfDomain, "phi unusable on the stencil");
  }
  const auto n = static_cast<Eigen::Index>(sig.dim());
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) g(i, i) = sig[static_cast<std::size_t>(i)] / (v * v);
  return g;
}

Point shifted(const Point& x, Eigen::Index axis, double delta) {
  Point y = x;
  y[axis] += delta;
  return y;
}

Christoffels fd_christoffels(const Signature& sig, const ScalarField& phi, const Point& x, double h) {
  const auto n = static_cast<Eigen::Index>(sig.dim());
  std::vector<Matrix> dg(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    dg[static_cast<std::size_t>(l)] =
        (metric_at(sig, phi, shifted(x, l, h)) - metric_at(sig, phi, shifted(x, l, -h))) / (2.0 * h);
  }
  const Matrix ginv = metric_at(sig, phi, x).inverse();
  Christoffels gamma(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) +
                             dg[static_cast<std::size_t>(j)](i, l) -
                             dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
      }
    }
  }
  return gamma;
}

double max_abs_diff(const SymTensor2& a, const SymTensor2& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace

SymTensor2 fd_ricci(const Signature& sig, const ScalarField& phi, const Point& x, double step) {
  if (!(step > 0.0)) throw SolitonError(ErrorCode::InvalidArgument, "FD step must be positive");
  const auto n = static_cast<Eigen::Index>(sig.dim());
  const auto un = static_cast<std::size_t>(n);
  const Christoffels gamma = fd_christoffels(sig, phi, x, step);
  // dgamma[m][k](i, j) = d_m Gamma^k_ij
  std::vector<Christoffels> dgamma(un);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Christoffels plus = fd_christoffels(sig, phi, shifted(x, m, step), step);
    const Christoffels minus = fd_christoffels(sig, phi, shifted(x, m, -step), step);
    auto& d = dgamma[static_cast<std::size_t>(m)];
    d.resize(un);
    for (std::size_t k = 0; k < un; ++k) d[k] = (plus[k] - minus[k]) / (2.0 * step);
  }
  Matrix ric = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double r = 0.0;
      for (std::size_t k = 0; k < un; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        r += dgamma[k][k](i, j);
        r -= dgamma[static_cast<std::size_t>(j)][k](i, kk);
        for (std::size_t l = 0; l < un; ++l) {
          const auto ll = static_cast<Eigen::Index>(l);
          r += gamma[k](kk, ll) * gamma[l](i, j);
          r -= gamma[k](j, ll) * gamma[l](i, kk);
        }
      }
      ric(i, j) = r;
    }
  }
  return SymTensor2::from_matrix(ric);
}

FdRicci fd_curvature_oracle(const Signature& sig, const ScalarField& phi, const Point& x,
                            double step) {
  const SymTensor2 r1 = fd_ricci(sig, phi, x, step);
  const SymTensor2 r2 = fd_ricci(sig, phi, x, 0.5 * step);
  const SymTensor2 r4 = fd_ricci(sig, phi, x, 0.25 * step);
  const double d12 = max_abs_diff(r1, r2);
  const double d24 = max_abs_diff(r2, r4);
  const double rate = (d12 > 0.0 && d24 > 0.0) ? std::log2(d12 / d24)
                                               : std::numeric_limits<double>::quiet_NaN();
  return FdRicci{r1, rate};
}

SymTensor2 fd_hessian(const Signature& sig, const ScalarField& phi, const ScalarField& f,
                      const Point& x, double step) {
  if (!(step > 0.0)) throw SolitonError(ErrorCode::InvalidArgument, "FD step must be positive");
  const auto n = static_cast<Eigen::Index>(sig.dim());
  const Christoffels gamma = fd_christoffels(sig, phi, x, step);
  Vector grad(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    grad[k] = (f(shifted(x, k, step)) - f(shifted(x, k, -step))) / (2.0 * step);
  }
  const double f0 = f(x);
  SymTensor2 out(sig.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double fij;
      if (i == j) {
        fij = (f(shifted(x, i, step)) - 2.0 * f0 + f(shifted(x, i, -step))) / (step * step);
      } else {
        const Point pp = shifted(shifted(x, i, step), j, step);
        const Point pm = shifted(shifted(x, i, step), j, -step);
        const Point mp = shifted(shifted(x, i, -step), j, step);
        const Point mm = shifted(shifted(x, i, -step), j, -step);
        fij = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step);
      }
      double v = fij;
      for (Eigen::Index k = 0; k < n; ++k) v -= gamma[static_cast<std::size_t>(k)](i, j) * grad[k];
      out.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j;
  j["max_offdiag"] = r.max_offdiag;
  j["max_diag"] = r.max_diag;
  j["max_trace"] = r.max_trace;
  j["max_tensor"] = r.max_tensor;
  j["mean_offdiag"] = r.mean_offdiag;
  j["mean_diag"] = r.mean_diag;
  j["mean_trace"] = r.mean_trace;
  j["mean_tensor"] = r.mean_tensor;
  j["oracle_gap"] = {{"max_gap", finite_or_null(r.oracle_gap.max_gap)},
                     {"step", r.oracle_gap.step},
                     {"rate", finite_or_null(r.oracle_gap.rate)},
                     {"points", r.oracle_gap.points}};
  j["points_evaluated"] = r.points_evaluated;
  j["scale"] = r.scale;
  j["threshold"] = r.threshold;
  j["oracle_tolerance"] = r.oracle_tolerance;
  j["verdict"] = r.pass ? "pass" : "fail";
  return j;
}

ResidualReport verify_profile(const SolitonProblem& p, const Profile& prof, const SampleSpec& spec,
                              double threshold, const VerifyOptions& options) {
  const Signature& sig = p.signature();
  const std::size_t n = p.dim();
  const std::vector<Point> points = sample_points(p, prof, spec);

  struct Sample {
    double offdiag = 0.0, diag = 0.0, trace = 0.0, tensor = 0.0;
  };
  std::vector<Sample> raw;
  raw.reserve(points.size());
  double phi_ddphi = 0.0;

  for (const Point& x : points) {
    const ProfileJet pj = prof.at(p.ansatz.xi(x));
    phi_ddphi = std::max(phi_ddphi, std::abs(pj.phi * pj.ddphi));
    const LiftedJets jets = lift_jet(p.ansatz, pj, x);
    const PDEResidual r = evaluate_pde(sig, jets.phi, jets.f, p.lambda);
    const SymTensor2 t = residual_soliton_tensor(sig, jets.phi, jets.f, p.lambda);
    const double phi2 = jets.phi.value * jets.phi.value;
    Sample s;
    s.offdiag = n > 1 ? r.off_diag.cwiseAbs().maxCoeff() : 0.0;
    s.diag = r.diag.cwiseAbs().maxCoeff();
    s.trace = std::abs(r.trace);
    s.tensor = phi2 * t.max_abs();
    raw.push_back(s);
  }

  ResidualReport rep;
  rep.scale = std::max({1.0, std::abs(p.lambda), phi_ddphi});
  rep.threshold = threshold;
  rep.oracle_tolerance = options.oracle_tolerance;
  rep.points_evaluated = points.size();
  for (const Sample& s : raw) {
    rep.max_offdiag = std::max(rep.max_offdiag, s.offdiag / rep.scale);
    rep.max_diag = std::max(rep.max_diag, s.diag / rep.scale);
    rep.max_trace = std::max(rep.max_trace, s.trace / rep.scale);
    rep.max_tensor = std::max(rep.max_tensor, s.tensor / rep.scale);
    rep.mean_offdiag += s.offdiag / rep.scale;
    rep.mean_diag += s.diag / rep.scale;
    rep.mean_trace += s.trace / rep.scale;
    rep.mean_tensor += s.tensor / rep.scale;
  }
  const double count = static_cast<double>(raw.size());
  rep.mean_offdiag /= count;
  rep.mean_diag /= count;
  rep.mean_trace /= count;
  rep.mean_tensor /= count;

  // FD oracle on the second-order Taylor model of phi in xi: it has the same
  // 2-jet at the sample as the lifted profile, and is smooth on the stencil.
  OracleGap gap;
  gap.step = options.fd_step;
  double coarse = 0.0, fine = 0.0;
  const std::size_t m = std::min(options.oracle_points, points.size());
  for (std::size_t s = 0; s < m; ++s) {
    const Point& x = points[s];
    const double xi0 = p.ansatz.xi(x);
    const ProfileJet pj = prof.at(xi0);
    const QuadricAnsatz& a = p.ansatz;
    ScalarField taylor = [&a, pj, xi0](const Point& y) {
      const double d = a.xi(y) - xi0;
      return pj.phi + d * (pj.dphi + 0.5 * d * pj.ddphi);
    };
    const LiftedJets jets = lift_jet(p.ansatz, pj, x);
    const SymTensor2 analytic = conformal_ricci(sig, jets.phi);
    const double phi2 = pj.phi * pj.phi;
    auto gap_at = [&](double h) {
      return phi2 * max_abs_diff(fd_ricci(sig, taylor, x, h), analytic) / rep.scale;
    };
    gap.max_gap = std::max(gap.max_gap, gap_at(options.fd_step));
    coarse = std::max(coarse, gap_at(100.0 * options.fd_step));
    fine = std::max(fine, gap_at(50.0 * options.fd_step));
    ++gap.points;
  }
  gap.rate = (coarse > 0.0 && fine > 0.0) ? std::log2(coarse / fine)
                                          : std::numeric_limits<double>::quiet_NaN();
  rep.oracle_gap = gap;

  rep.pass = rep.max_offdiag <= threshold && rep.max_diag <= threshold &&
             rep.max_trace <= threshold && rep.max_tensor <= threshold &&
             rep.oracle_gap.max_gap <= options.oracle_tolerance;
  return rep;
}

}  // namespace soliton
