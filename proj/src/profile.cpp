#include "soliton/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace soliton {
namespace {

struct Quintic {
  double value;
  double slope;
};

// Quintic Hermite on [x0, x0 + h] matching value, first and second derivative at both ends.
Quintic quintic_hermite(double t, double h, double p0, double d0, double s0, double p1, double d1,
                        double s1) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 0.5 * t3 - t4 + 0.5 * t5;
  const double g0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double g1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double g2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
  const double g3 = 30 * t2 - 60 * t3 + 30 * t4;
  const double g4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double g5 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
  const double hh = h * h;
  Quintic q;
  q.value = p0 * h0 + h * d0 * h1 + hh * s0 * h2 + p1 * h3 + h * d1 * h4 + hh * s1 * h5;
  q.slope = (p0 * g0 + h * d0 * g1 + hh * s0 * g2 + p1 * g3 + h * d1 * g4 + hh * s1 * g5) / h;
  return q;
}

}  // namespace

Profile::Profile(std::vector<ReducedState> nodes, FirstOrder first_order,
                 SecondDerivativeModel model, ProfileTermination termination)
    : nodes_(std::make_shared<const std::vector<ReducedState>>(std::move(nodes))),
      first_order_(std::move(first_order)),
      model_(std::move(model)),
      term_(termination) {
  if (nodes_->empty()) throw SolitonError(ErrorCode::ProfileMalformed, "profile has no nodes");
  lo_ = std::min(nodes_->front().xi, nodes_->back().xi);
  hi_ = std::max(nodes_->front().xi, nodes_->back().xi);
}

Profile Profile::from_table(std::vector<ReducedState> nodes, SecondDerivativeModel model) {
  if (nodes.size() < 2) {
    throw SolitonError(ErrorCode::ProfileMalformed, "profile table needs at least two rows");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& s = nodes[i];
    if (!std::isfinite(s.xi) || !std::isfinite(s.phi) || !std::isfinite(s.dphi) ||
        !std::isfinite(s.f) || !std::isfinite(s.df)) {
      throw SolitonError(ErrorCode::ProfileMalformed, "non-finite value in row " + std::to_string(i));
    }
  }
  const bool forward = nodes.back().xi > nodes.front().xi;
  if (!forward) std::reverse(nodes.begin(), nodes.end());
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i].xi > nodes[i - 1].xi)) {
      throw SolitonError(ErrorCode::ProfileMalformed,
                         "xi column is not strictly monotone at row " + std::to_string(i));
    }
  }
  struct Table {
    std::vector<ReducedState> nodes;
    std::vector<double> ddphi;
    std::vector<double> ddf;
  };
  auto table = std::make_shared<Table>();
  table->nodes = nodes;
  for (const auto& s : nodes) {
    const ProfileJet j = model(s);
    table->ddphi.push_back(j.ddphi);
    table->ddf.push_back(j.ddf);
  }
  FirstOrder fo = [table](double xi) {
    const auto& ns = table->nodes;
    auto it = std::lower_bound(ns.begin(), ns.end(), xi,
                               [](const ReducedState& s, double v) { return s.xi < v; });
    if (it != ns.end() && it->xi == xi) return *it;
    const auto hi = static_cast<std::size_t>(it - ns.begin());
    const std::size_t lo = hi - 1;
    const auto& a = ns[lo];
    const auto& b = ns[hi];
    const double h = b.xi - a.xi;
    const double t = (xi - a.xi) / h;
    const Quintic phi = quintic_hermite(t, h, a.phi, a.dphi, table->ddphi[lo], b.phi, b.dphi,
                                        table->ddphi[hi]);
    const Quintic f =
        quintic_hermite(t, h, a.f, a.df, table->ddf[lo], b.f, b.df, table->ddf[hi]);
    return ReducedState{xi, phi.value, phi.slope, f.value, f.slope};
  };
  return Profile(std::move(nodes), std::move(fo), std::move(model), ProfileTermination{});
}

ReducedState Profile::first_order(double xi) const {
  if (!contains(xi)) {
    throw SolitonError(ErrorCode::OutOfDomain, "xi = " + std::to_string(xi) +
                                                   " outside profile range [" +
                                                   std::to_string(lo_) + ", " +
                                                   std::to_string(hi_) + "]");
  }
  return first_order_(xi);
}

ProfileJet Profile::at(double xi) const { return model_(first_order(xi)); }

Profile Profile::with_first_order(FirstOrder fo) const {
  Profile p = *this;
  p.first_order_ = std::move(fo);
  return p;
}

}  // namespace soliton
