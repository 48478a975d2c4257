#include "soliton/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace soliton {

std::string event_name(EventKind kind) {
  switch (kind) {
    case EventKind::PhiZero: return "phi_zero";
    case EventKind::HZero: return "h_zero";
    case EventKind::SingularLocus: return "singular_locus";
    case EventKind::FieldBlowup: return "field_blowup";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer & Wanner, DOPRI5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Stages {
  explicit Stages(std::size_t n) {
    for (auto& k : k) k.assign(n, 0.0);
    tmp.assign(n, 0.0);
    y1.assign(n, 0.0);
  }
  std::array<std::vector<double>, 7> k;
  std::vector<double> tmp;
  std::vector<double> y1;
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// One Dormand-Prince step from (t, y) with k[0] = f(t, y) already set. Fills
// y1 and k[1..6] (k[6] = f(t + h, y1)). Returns false when the RHS refuses a
// stage or produces non-finite values.
bool dopri_step(const OdeRhs& rhs, double t, std::span<const double> y, double h, Stages& s) {
  const std::size_t n = y.size();
  auto& k = s.k;
  auto& tmp = s.tmp;
  auto stage = [&](double ct, std::vector<double>& out) {
    rhs(t + ct * h, tmp, out);
    return all_finite(out);
  };
  try {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k[0][i];
    if (!stage(c2, k[1])) return false;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    if (!stage(c3, k[2])) return false;
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    if (!stage(c4, k[3])) return false;
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    if (!stage(c5, k[4])) return false;
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                           a65 * k[4][i]);
    if (!stage(1.0, k[5])) return false;
    for (std::size_t i = 0; i < n; ++i)
      s.y1[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                            a76 * k[5][i]);
    if (!all_finite(s.y1)) return false;
    tmp = s.y1;
    if (!stage(1.0, k[6])) return false;
  } catch (const SolitonError&) {
    return false;
  }
  return true;
}

double error_norm(std::span<const double> y, const Stages& s, double h, const StepControl& c) {
  const auto& k = s.k;
  double acc = 0.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double err = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                            e6 * k[5][i] + e7 * k[6][i]);
    const double sc = c.abs_tol + c.rel_tol * std::max(std::abs(y[i]), std::abs(s.y1[i]));
    acc += (err / sc) * (err / sc);
  }
  return std::sqrt(acc / static_cast<double>(n));
}

double dense_value(const double* coef, std::size_t n, std::size_t i, double theta) {
  const double r1 = coef[i], r2 = coef[n + i], r3 = coef[2 * n + i], r4 = coef[3 * n + i],
               r5 = coef[4 * n + i];
  const double om = 1.0 - theta;
  return r1 + theta * (r2 + om * (r3 + theta * (r4 + om * r5)));
}

}  // namespace

struct DenseSolutionBuilder {
  static void start(DenseSolution& d, double t0, std::span<const double> y0) {
    d.dim_ = y0.size();
    d.t_.push_back(t0);
    d.y_.insert(d.y_.end(), y0.begin(), y0.end());
  }

  static void append(DenseSolution& d, double t0, double h, std::span<const double> y0,
                     const Stages& s, double t_end, std::span<const double> y_end) {
    const std::size_t n = d.dim_;
    const auto& k = s.k;
    const std::size_t base = d.coef_.size();
    d.coef_.resize(base + 5 * n);
    double* c = d.coef_.data() + base;
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = s.y1[i] - y0[i];
      const double bspl = h * k[0][i] - ydiff;
      c[i] = y0[i];
      c[n + i] = ydiff;
      c[2 * n + i] = bspl;
      c[3 * n + i] = ydiff - h * k[6][i] - bspl;
      c[4 * n + i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                          d6 * k[5][i] + d7 * k[6][i]);
    }
    (void)t0;
    d.h_.push_back(h);
    d.t_.push_back(t_end);
    d.y_.insert(d.y_.end(), y_end.begin(), y_end.end());
  }

  static void dense_at(const double* coef, std::size_t n, double theta, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = dense_value(coef, n, i, theta);
  }

  static DenseSolution run(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                           const StepControl& control, const std::vector<EventCondition>& events) {
    if (!(t1 != t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
      throw SolitonError(ErrorCode::InvalidArgument, "integration span is degenerate");
    }
    if (!(control.rel_tol > 0.0) || !(control.abs_tol > 0.0)) {
      throw SolitonError(ErrorCode::InvalidArgument, "tolerances must be positive");
    }
    const std::size_t n = y0.size();
    for (const auto& ev : events) {
      const double m = ev.margin(t0, y0);
      if (!(m > 0.0)) {
        throw SolitonError(ErrorCode::EventAtStart,
                           event_name(ev.kind) + " condition already met at the initial point");
      }
    }

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double hmax = control.max_step > 0.0 ? control.max_step : span / 200.0;

    DenseSolution d;
    start(d, t0, y0);

    std::vector<double> y(y0.begin(), y0.end());
    Stages s(n);
    rhs(t0, y, s.k[0]);
    if (!all_finite(s.k[0])) {
      throw SolitonError(ErrorCode::InvalidArgument, "right-hand side is not finite at the start");
    }

    // Initial step guess (Hairer & Wanner, II.4).
    double h;
    {
      double dn0 = 0.0, dn1 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sc = control.abs_tol + control.rel_tol * std::abs(y[i]);
        dn0 += (y[i] / sc) * (y[i] / sc);
        dn1 += (s.k[0][i] / sc) * (s.k[0][i] / sc);
      }
      dn0 = std::sqrt(dn0 / n);
      dn1 = std::sqrt(dn1 / n);
      h = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
      h = std::min(h, hmax);
      const double h1 = std::pow(0.01 / std::max(dn1, 1e-15), 1.0 / 5.0);
      h = std::min({100.0 * h, std::max(h1, 1e-6), hmax, span});
    }

    double t = t0;
    bool last_rejected = false;
    std::size_t steps = 0;
    std::vector<double> probe(n);

    while (true) {
      if (++steps > control.max_steps) {
        throw SolitonError(ErrorCode::StepSizeUnderflow, "maximum number of steps exceeded");
      }
      const double remaining = std::abs(t1 - t);
      bool final_step = false;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        final_step = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw SolitonError(ErrorCode::StepSizeUnderflow,
                           "step size underflow at t = " + std::to_string(t));
      }
      const double hs = dir * h;
      const bool ok = dopri_step(rhs, t, y, hs, s);
      const double err = ok ? error_norm(y, s, hs, control) : std::numeric_limits<double>::infinity();
      if (!(err <= 1.0)) {
        ++d.rejected_;
        const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
        h *= fac;
        last_rejected = true;
        continue;
      }

      const double t_new = final_step ? t1 : t + hs;
      const double* coef_ptr = nullptr;
      // Stage the segment so events can be located on its dense output.
      append(d, t, hs, y, s, t_new, s.y1);
      coef_ptr = d.coef_.data() + d.coef_.size() - 5 * n;

      // Event detection on the accepted step.
      double theta_event = 2.0;
      std::optional<EventKind> fired;
      for (const auto& ev : events) {
        const double m_end = ev.margin(t_new, s.y1);
        if (m_end > 0.0) continue;
        double lo = 0.0, hi = 1.0;
        while ((hi - lo) * h > control.event_tol) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          dense_at(coef_ptr, n, mid, probe);
          const double m = ev.margin(t + mid * hs, probe);
          if (m > 0.0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        if (lo < theta_event) {
          theta_event = lo;
          fired = ev.kind;
        }
      }
      if (fired) {
        const double t_stop = t + theta_event * hs;
        dense_at(coef_ptr, n, theta_event, probe);
        d.t_.back() = t_stop;
        std::copy(probe.begin(), probe.end(), d.y_.end() - static_cast<std::ptrdiff_t>(n));
        d.term_ = Termination{false, fired, t_stop};
        return d;
      }

      t = t_new;
      y = s.y1;
      s.k[0] = s.k[6];
      if (final_step) {
        d.term_ = Termination{true, std::nullopt, t};
        return d;
      }
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, hmax);
      last_rejected = false;
    }
  }
};

std::span<const double> DenseSolution::state(std::size_t node) const {
  return std::span<const double>(y_.data() + node * dim_, dim_);
}

double DenseSolution::t_min() const { return std::min(t_.front(), t_.back()); }
double DenseSolution::t_max() const { return std::max(t_.front(), t_.back()); }

void DenseSolution::evaluate(double t, std::span<double> out) const {
  if (!contains(t)) {
    throw SolitonError(ErrorCode::OutOfDomain, "t = " + std::to_string(t) + " outside [" +
                                                   std::to_string(t_min()) + ", " +
                                                   std::to_string(t_max()) + "]");
  }
  const bool forward = t_.back() >= t_.front();
  // Index of the first node not before t in the integration direction.
  auto it = forward ? std::lower_bound(t_.begin(), t_.end(), t)
                    : std::lower_bound(t_.begin(), t_.end(), t, std::greater<double>());
  const auto idx = static_cast<std::size_t>(it - t_.begin());
  if (it != t_.end() && *it == t) {
    auto s = state(idx);
    std::copy(s.begin(), s.end(), out.begin());
    return;
  }
  const std::size_t seg = idx - 1;
  const double theta = (t - t_[seg]) / h_[seg];
  const double* coef = coef_.data() + seg * 5 * dim_;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = dense_value(coef, dim_, i, theta);
}

std::vector<double> DenseSolution::evaluate(double t) const {
  std::vector<double> out(dim_);
  evaluate(t, out);
  return out;
}

DenseSolution integrate(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                        const StepControl& control, const std::vector<EventCondition>& events) {
  return DenseSolutionBuilder::run(rhs, y0, t0, t1, control, events);
}

std::vector<double> integrate_fixed(const OdeRhs& rhs, std::span<const double> y0, double t0,
                                    double t1, std::size_t steps) {
  if (steps == 0) throw SolitonError(ErrorCode::InvalidArgument, "need at least one step");
  const std::size_t n = y0.size();
  std::vector<double> y(y0.begin(), y0.end());
  Stages s(n);
  const double h = (t1 - t0) / static_cast<double>(steps);
  rhs(t0, y, s.k[0]);
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = t0 + static_cast<double>(step) * h;
    if (!dopri_step(rhs, t, y, h, s)) {
      throw SolitonError(ErrorCode::InvalidArgument, "right-hand side failed in fixed-step run");
    }
    y = s.y1;
    s.k[0] = s.k[6];
  }
  return y;
}

ConvergenceEstimate convergence_order(const OdeRhs& rhs, std::span<const double> y0, double t0,
                                      double t1, std::size_t base_steps) {
  const auto y1 = integrate_fixed(rhs, y0, t0, t1, base_steps);
  const auto y2 = integrate_fixed(rhs, y0, t0, t1, 2 * base_steps);
  const auto y4 = integrate_fixed(rhs, y0, t0, t1, 4 * base_steps);
  double d12 = 0.0, d24 = 0.0, mag = 1.0;
  for (std::size_t i = 0; i < y1.size(); ++i) {
    d12 = std::max(d12, std::abs(y1[i] - y2[i]));
    d24 = std::max(d24, std::abs(y2[i] - y4[i]));
    mag = std::max(mag, std::abs(y4[i]));
  }
  ConvergenceEstimate est;
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * mag;
  if (d24 <= floor || d12 <= floor) {
    est.skipped = true;
    est.notice = "differences at rounding floor; scheme is exact for this problem";
    return est;
  }
  est.order = std::log2(d12 / d24);
  return est;
}

}  // namespace soliton
