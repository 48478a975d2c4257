#include "soliton/ode_reduction.hpp"

#include "soliton/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace soliton {

std::string soliton_type(double lambda) {
  if (lambda > 0.0) return "shrinking";
  if (lambda < 0.0) return "expanding";
  return "steady";
}

ReducedDerivatives reduced_rhs(const SolitonProblem& p, const ReducedState& s) {
  const double tau = p.ansatz.tau();
  const double Lambda = p.ansatz.lambda_constant();
  if (tau == 0.0 && Lambda == 0.0) {
    throw SolitonError(ErrorCode::NullTranslationDirection,
                       "tau = 0 with lightlike alpha (Lambda = 0): phi'' is undetermined");
  }
  const double T = 4.0 * tau * s.xi + Lambda;
  if (std::abs(T) <= kTolSingular) {
    throw SolitonError(ErrorCode::SingularLocus,
                       "4 tau xi + Lambda = " + std::to_string(T) + " at xi = " + std::to_string(s.xi));
  }
  if (std::abs(s.phi) <= kTolPhi) {
    throw SolitonError(ErrorCode::DegenerateConformalFactor,
                       "phi = " + std::to_string(s.phi) + " at xi = " + std::to_string(s.xi));
  }
  const double nm1 = static_cast<double>(p.dim()) - 1.0;
  const double nm2 = static_cast<double>(p.dim()) - 2.0;
  const double phi = s.phi, dphi = s.dphi, df = s.df;

  ReducedDerivatives d;
  d.dphi = dphi;
  d.df = df;
  d.ddphi = ((p.lambda - 2.0 * tau * phi * (2.0 * nm1 * dphi + phi * df)) / T +
             nm1 * dphi * dphi + phi * dphi * df) /
            phi;
  d.ddf = -(nm2 * d.ddphi + 2.0 * dphi * df) / phi;
  return d;
}

double special_rhs(const SolitonProblem& p, const SpecialParams& sp, double xi, double h) {
  const double tau = p.ansatz.tau();
  if (tau == 0.0) {
    throw SolitonError(ErrorCode::RequiresNonzeroTau, "constrained branch needs tau != 0");
  }
  if (!(h > 0.0)) {
    throw SolitonError(ErrorCode::NonPositiveH, "h = " + std::to_string(h) + " at xi = " +
                                                    std::to_string(xi));
  }
  const double n = static_cast<double>(p.dim());
  const double T = 4.0 * tau * xi + p.ansatz.lambda_constant();
  return (sp.c2 * T + p.lambda / (2.0 * tau) - sp.c1 * std::pow(h, -(n - 2.0) / (n + 2.0))) /
         (n - 1.0);
}

double special_df(std::size_t n, const SpecialParams& sp, double h) {
  const double nd = static_cast<double>(n);
  return sp.c1 * std::pow(h, -2.0 * nd / (nd + 2.0));
}

namespace {

// Second derivatives of the constrained branch from first-order data, with
// h = phi^2 and h' = 2 phi phi' taken from the data itself.
ProfileJet special_jet_from_data(const SolitonProblem& p, const SpecialParams& sp,
                                 const ReducedState& s) {
  const double n = static_cast<double>(p.dim());
  const double tau = p.ansatz.tau();
  const double pw = (n - 2.0) / (n + 2.0);
  const double h = s.phi * s.phi;
  const double dh = 2.0 * s.phi * s.dphi;
  const double ddh = (4.0 * tau * sp.c2 + sp.c1 * pw * std::pow(h, -pw - 1.0) * dh) / (n - 1.0);
  ProfileJet j;
  j.xi = s.xi;
  j.phi = s.phi;
  j.dphi = s.dphi;
  j.ddphi = (ddh - 2.0 * s.dphi * s.dphi) / (2.0 * s.phi);
  j.f = s.f;
  j.df = s.df;
  j.ddf = -(2.0 * n / (n + 2.0)) * sp.c1 * std::pow(h, -2.0 * n / (n + 2.0) - 1.0) * dh;
  return j;
}

ReducedState special_state(const SolitonProblem& p, const SpecialParams& sp, double xi, double h,
                           double f) {
  const double dh = special_rhs(p, sp, xi, h);
  const double phi = std::sqrt(h);
  return ReducedState{xi, phi, dh / (2.0 * phi), f, special_df(p.dim(), sp, h)};
}

}  // namespace

ProfileJet special_jet(const SolitonProblem& p, const SpecialParams& sp, double xi, double h,
                       double f) {
  return special_jet_from_data(p, sp, special_state(p, sp, xi, h, f));
}

double check_special_constraint(std::size_t n, std::span<const ProfileJet> samples) {
  double worst = 0.0;
  for (const auto& j : samples) {
    worst = std::max(worst, std::abs(2.0 * static_cast<double>(n) * j.ddphi + j.phi * j.ddf));
  }
  return worst;
}

std::pair<double, double> reduced_equation_residuals(const SolitonProblem& p, const ProfileJet& j) {
  const double nm1 = static_cast<double>(p.dim()) - 1.0;
  const double nm2 = static_cast<double>(p.dim()) - 2.0;
  const double tau = p.ansatz.tau();
  const double T = 4.0 * tau * j.xi + p.ansatz.lambda_constant();
  const double first = nm2 * j.ddphi + j.ddf * j.phi + 2.0 * j.dphi * j.df;
  const double second = 2.0 * tau * j.phi * (2.0 * nm1 * j.dphi + j.phi * j.df) +
                        (j.phi * j.ddphi - nm1 * j.dphi * j.dphi - j.phi * j.dphi * j.df) * T -
                        p.lambda;
  return {first, second};
}

double singular_constraint_residual(const SolitonProblem& p, const ReducedState& s) {
  const double nm1 = static_cast<double>(p.dim()) - 1.0;
  return 2.0 * p.ansatz.tau() * s.phi * (2.0 * nm1 * s.dphi + s.phi * s.df) - p.lambda;
}

double trivial_locus_drift(const SolitonProblem& p, const ReducedState& s) {
  const auto d = reduced_rhs(p, s);
  const double nm2 = static_cast<double>(p.dim()) - 2.0;
  return nm2 * d.ddphi + s.dphi * s.df + s.phi * d.ddf;
}

SecondDerivativeModel reduced_model(const SolitonProblem& p) {
  return [p](const ReducedState& s) {
    const auto d = reduced_rhs(p, s);
    return ProfileJet{s.xi, s.phi, s.dphi, d.ddphi, s.f, s.df, d.ddf};
  };
}

SecondDerivativeModel special_model(const SolitonProblem& p, const SpecialParams& sp) {
  if (p.ansatz.tau() == 0.0) {
    throw SolitonError(ErrorCode::RequiresNonzeroTau, "constrained branch needs tau != 0");
  }
  return [p, sp](const ReducedState& s) { return special_jet_from_data(p, sp, s); };
}

namespace {

ProfileTermination to_profile_termination(const Termination& t) {
  return ProfileTermination{t.completed, t.event, t.t_stop};
}

}  // namespace

Profile solve_reduced(const SolitonProblem& p, const ReducedState& initial,
                      const IntegrationConfig& cfg) {
  ReducedState start = initial;
  start.xi = cfg.xi_start;
  // Surfaces NullTranslationDirection / SingularLocus / degenerate phi before integrating.
  (void)reduced_rhs(p, start);

  OdeRhs rhs = [p](double xi, std::span<const double> y, std::span<double> dy) {
    const auto d = reduced_rhs(p, ReducedState{xi, y[0], y[1], y[2], y[3]});
    dy[0] = d.dphi;
    dy[1] = d.ddphi;
    dy[2] = d.df;
    dy[3] = d.ddf;
  };

  const double phi_sign = start.phi > 0.0 ? 1.0 : -1.0;
  const StopConditions stops = cfg.stops;
  std::vector<EventCondition> events;
  events.push_back({EventKind::PhiZero, [phi_sign, stops](double, std::span<const double> y) {
                      return phi_sign * y[0] - stops.phi_floor;
                    }});
  if (p.ansatz.tau() != 0.0) {
    const double tau = p.ansatz.tau();
    const double Lambda = p.ansatz.lambda_constant();
    const double t_sign = (4.0 * tau * start.xi + Lambda) > 0.0 ? 1.0 : -1.0;
    events.push_back({EventKind::SingularLocus,
                      [tau, Lambda, t_sign, stops](double xi, std::span<const double>) {
                        return t_sign * (4.0 * tau * xi + Lambda) - stops.singular_guard;
                      }});
  }
  events.push_back({EventKind::FieldBlowup, [stops](double, std::span<const double> y) {
                      const double m = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[3])});
                      return std::isfinite(m) ? stops.blowup - m : -1.0;
                    }});

  const std::vector<double> y0{start.phi, start.dphi, start.f, start.df};
  auto sol = std::make_shared<const DenseSolution>(
      integrate(rhs, y0, cfg.xi_start, cfg.xi_end, cfg.control, events));

  std::vector<ReducedState> nodes;
  nodes.reserve(sol->nodes().size());
  for (std::size_t i = 0; i < sol->nodes().size(); ++i) {
    const auto y = sol->state(i);
    nodes.push_back(ReducedState{sol->nodes()[i], y[0], y[1], y[2], y[3]});
  }
  Profile::FirstOrder fo = [sol](double xi) {
    const auto y = sol->evaluate(xi);
    return ReducedState{xi, y[0], y[1], y[2], y[3]};
  };
  return Profile(std::move(nodes), std::move(fo), reduced_model(p),
                 to_profile_termination(sol->termination()));
}

Profile solve_special(const SolitonProblem& p, const SpecialParams& sp,
                      const IntegrationConfig& cfg) {
  if (p.ansatz.tau() == 0.0) {
    throw SolitonError(ErrorCode::RequiresNonzeroTau, "constrained branch needs tau != 0");
  }
  if (!(sp.h0 > 0.0)) {
    throw SolitonError(ErrorCode::NonPositiveH, "h0 must be positive");
  }
  const std::size_t n = p.dim();
  OdeRhs rhs = [p, sp, n](double xi, std::span<const double> y, std::span<double> dy) {
    dy[0] = special_rhs(p, sp, xi, y[0]);
    dy[1] = special_df(n, sp, y[0]);
  };

  const StopConditions stops = cfg.stops;
  std::vector<EventCondition> events;
  events.push_back({EventKind::HZero, [stops](double, std::span<const double> y) {
                      return y[0] - stops.phi_floor * stops.phi_floor;
                    }});
  events.push_back({EventKind::FieldBlowup, [p, sp, n, stops](double xi, std::span<const double> y) {
                      if (!(y[0] > 0.0)) return -1.0;
                      const double phi = std::sqrt(y[0]);
                      double dphi;
                      try {
                        dphi = special_rhs(p, sp, xi, y[0]) / (2.0 * phi);
                      } catch (const SolitonError&) {
                        return -1.0;
                      }
                      const double m =
                          std::max({phi, std::abs(dphi), std::abs(special_df(n, sp, y[0]))});
                      return std::isfinite(m) ? stops.blowup - m : -1.0;
                    }});

  const std::vector<double> y0{sp.h0, sp.f0};
  auto sol = std::make_shared<const DenseSolution>(
      integrate(rhs, y0, cfg.xi_start, cfg.xi_end, cfg.control, events));

  std::vector<ReducedState> nodes;
  nodes.reserve(sol->nodes().size());
  for (std::size_t i = 0; i < sol->nodes().size(); ++i) {
    const auto y = sol->state(i);
    nodes.push_back(special_state(p, sp, sol->nodes()[i], y[0], y[1]));
  }
  Profile::FirstOrder fo = [sol, p, sp](double xi) {
    const auto y = sol->evaluate(xi);
    return special_state(p, sp, xi, y[0], y[1]);
  };
  return Profile(std::move(nodes), std::move(fo), special_model(p, sp),
                 to_profile_termination(sol->termination()));
}

// ---------------------------------------------------------------------------
// Closed-form gallery

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"gaussian", "cigar", "space_form", "n2_polynomial"};
  return names;
}

GalleryName parse_gallery_name(const std::string& name) {
  if (name == "gaussian") return GalleryName::Gaussian;
  if (name == "cigar") return GalleryName::Cigar;
  if (name == "space_form") return GalleryName::SpaceForm;
  if (name == "n2_polynomial") return GalleryName::N2Polynomial;
  throw SolitonError(ErrorCode::InvalidGalleryParams, "unknown gallery entry '" + name + "'");
}

std::string gallery_name(GalleryName g) {
  return gallery_names()[static_cast<std::size_t>(g)];
}

double space_form_lambda(std::size_t n, double tau, double Lambda, double b1, double b2) {
  return (static_cast<double>(n) - 1.0) * b1 * (4.0 * tau * b2 - b1 * Lambda);
}

namespace {

struct ClosedForm {
  // phi, phi', phi'', f, f', f'' at xi
  std::function<ProfileJet(double)> eval;
};

double param(const GalleryParams& params, const std::string& key, std::optional<double> fallback) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw SolitonError(ErrorCode::InvalidGalleryParams, "missing parameter '" + key + "'");
}

void reject_unknown(const GalleryParams& params, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw SolitonError(ErrorCode::InvalidGalleryParams, "unknown parameter '" + key + "'");
  }
}

// Antiderivative of 1 / (a xi^2 + b xi + c).
double inverse_quadratic_integral(double a, double b, double c, double xi) {
  if (a == 0.0) {
    if (b == 0.0) return xi / c;
    return std::log(std::abs(b * xi + c)) / b;
  }
  const double disc = b * b - 4.0 * a * c;
  const double u = 2.0 * a * xi + b;
  if (disc < 0.0) {
    const double r = std::sqrt(-disc);
    return 2.0 / r * std::atan(u / r);
  }
  if (disc > 0.0) {
    const double r = std::sqrt(disc);
    return std::log(std::abs((u - r) / (u + r))) / r;
  }
  return -2.0 / u;
}

}  // namespace

GallerySolution gallery(GalleryName name, const GalleryParams& params, const QuadricAnsatz& ansatz,
                        std::optional<double> lambda, double xi_lo, double xi_hi,
                        std::size_t nodes) {
  if (!(xi_hi > xi_lo)) {
    throw SolitonError(ErrorCode::InvalidGalleryParams, "gallery range must satisfy lo < hi");
  }
  if (nodes < 2) throw SolitonError(ErrorCode::InvalidGalleryParams, "need at least two nodes");
  const std::size_t n = ansatz.dim();
  const double tau = ansatz.tau();
  const double Lambda = ansatz.lambda_constant();
  ClosedForm cf;
  double lam = lambda.value_or(0.0);

  switch (name) {
    case GalleryName::Gaussian: {
      reject_unknown(params, {"k", "a2"});
      const double k = param(params, "k", 1.0);
      const double a2 = param(params, "a2", 0.0);
      if (tau == 0.0) throw SolitonError(ErrorCode::InvalidGalleryParams, "gaussian needs tau != 0");
      if (std::abs(k) <= kTolPhi) throw SolitonError(ErrorCode::InvalidGalleryParams, "gaussian needs k != 0");
      const double a1 = lam / (2.0 * tau * k * k);
      cf.eval = [k, a1, a2](double xi) { return ProfileJet{xi, k, 0.0, 0.0, a1 * xi + a2, a1, 0.0}; };
      break;
    }
    case GalleryName::Cigar: {
      reject_unknown(params, {});
      if (n != 2) throw SolitonError(ErrorCode::InvalidGalleryParams, "cigar needs n = 2");
      if (lam != 0.0) throw SolitonError(ErrorCode::InvalidGalleryParams, "cigar is steady (lambda = 0)");
      if (!(1.0 + xi_lo > 0.0)) {
        throw SolitonError(ErrorCode::InvalidGalleryParams, "cigar needs 1 + xi > 0 on the range");
      }
      cf.eval = [](double xi) {
        const double u = 1.0 + xi;
        const double r = std::sqrt(u);
        return ProfileJet{xi, r, 0.5 / r, -0.25 / (u * r), -std::log(u), -1.0 / u, 1.0 / (u * u)};
      };
      break;
    }
    case GalleryName::SpaceForm: {
      reject_unknown(params, {"b1", "b2", "f0"});
      const double b1 = param(params, "b1", std::nullopt);
      const double b2 = param(params, "b2", std::nullopt);
      const double f0 = param(params, "f0", 0.0);
      const double forced = space_form_lambda(n, tau, Lambda, b1, b2);
      if (lambda && std::abs(*lambda - forced) > 1e-12 * std::max(1.0, std::abs(forced))) {
        throw SolitonError(ErrorCode::InvalidGalleryParams,
                           "space form forces lambda = " + std::to_string(forced));
      }
      lam = forced;
      const double e0 = b1 * xi_lo + b2, e1 = b1 * xi_hi + b2;
      if (!(e0 * e1 > 0.0) || std::min(std::abs(e0), std::abs(e1)) <= kTolPhi) {
        throw SolitonError(ErrorCode::InvalidGalleryParams, "phi = b1 xi + b2 vanishes on the range");
      }
      cf.eval = [b1, b2, f0](double xi) { return ProfileJet{xi, b1 * xi + b2, b1, 0.0, f0, 0.0, 0.0}; };
      break;
    }
    case GalleryName::N2Polynomial: {
      reject_unknown(params, {"c1", "c2", "c3", "f0"});
      if (n != 2) throw SolitonError(ErrorCode::InvalidGalleryParams, "n2_polynomial needs n = 2");
      if (tau == 0.0) throw SolitonError(ErrorCode::InvalidGalleryParams, "n2_polynomial needs tau != 0");
      const double c1 = param(params, "c1", std::nullopt);
      const double c2 = param(params, "c2", std::nullopt);
      const double c3 = param(params, "c3", std::nullopt);
      const double f0 = param(params, "f0", 0.0);
      const double qa = 2.0 * c2 * tau;
      const double qb = c2 * Lambda + lam / (2.0 * tau) - c1;
      const double qc = c3;
      auto h = [=](double xi) { return (qa * xi + qb) * xi + qc; };
      double hmin = std::min(h(xi_lo), h(xi_hi));
      if (qa != 0.0) {
        const double vertex = -qb / (2.0 * qa);
        if (vertex > xi_lo && vertex < xi_hi) hmin = std::min(hmin, h(vertex));
      }
      if (!(hmin > 0.0)) {
        throw SolitonError(ErrorCode::InvalidGalleryParams, "h must stay positive on the range");
      }
      const double F0 = inverse_quadratic_integral(qa, qb, qc, xi_lo);
      cf.eval = [=](double xi) {
        const double hv = h(xi);
        const double dh = 2.0 * qa * xi + qb;
        const double phi = std::sqrt(hv);
        const double dphi = dh / (2.0 * phi);
        const double ddphi = (2.0 * qa - 2.0 * dphi * dphi) / (2.0 * phi);
        const double f = f0 + c1 * (inverse_quadratic_integral(qa, qb, qc, xi) - F0);
        return ProfileJet{xi, phi, dphi, ddphi, f, c1 / hv, -c1 * dh / (hv * hv)};
      };
      break;
    }
  }

  std::vector<ReducedState> grid;
  grid.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double xi = i + 1 == nodes
                          ? xi_hi
                          : xi_lo + (xi_hi - xi_lo) * static_cast<double>(i) /
                                        static_cast<double>(nodes - 1);
    const ProfileJet j = cf.eval(xi);
    grid.push_back(ReducedState{xi, j.phi, j.dphi, j.f, j.df});
  }
  auto eval = cf.eval;
  Profile::FirstOrder fo = [eval](double xi) {
    const ProfileJet j = eval(xi);
    return ReducedState{xi, j.phi, j.dphi, j.f, j.df};
  };
  SecondDerivativeModel model = [eval](const ReducedState& s) {
    const ProfileJet j = eval(s.xi);
    return ProfileJet{s.xi, s.phi, s.dphi, j.ddphi, s.f, s.df, j.ddf};
  };
  ProfileTermination term{true, std::nullopt, xi_hi};
  return GallerySolution{Profile(std::move(grid), std::move(fo), std::move(model), term), lam};
}

LiftedJets lift_jet(const QuadricAnsatz& a, const ProfileJet& j, const Point& x) {
  const ScalarJet2 xi = a.xi_jet(x);
  const Matrix outer = xi.gradient * xi.gradient.transpose();
  return LiftedJets{
      ScalarJet2(j.phi, j.dphi * xi.gradient, j.ddphi * outer + j.dphi * xi.hessian),
      ScalarJet2(j.f, j.df * xi.gradient, j.ddf * outer + j.df * xi.hessian)};
}

LiftedJets lift(const SolitonProblem& p, const Profile& prof, const Point& x) {
  const double xi = p.ansatz.xi(x);
  return lift_jet(p.ansatz, prof.at(xi), x);
}

}  // namespace soliton
