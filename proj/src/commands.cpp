#include "soliton/commands.hpp"

#include "soliton/profile_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace soliton {
namespace {

using nlohmann::json;

std::vector<double> to_std(const Vector& v) {
  std::vector<double> out;
  for (double e : v) out.push_back(e + 0.0);  // no -0 in JSON
  return out;
}

json invariance_json(const QuadricAnsatz& a) {
  const InvarianceClass c = classify(a);
  json j;
  if (c.kind == InvarianceKind::Translational) {
    j["kind"] = "translational";
    j["direction"] = to_std(c.direction);
    j["causal_sign"] = c.causal_sign;
  } else {
    j["kind"] = "pseudo_rotational";
    j["center"] = to_std(c.center);
  }
  return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

IntegrationConfig integration_config(const ProblemConfig& cfg) {
  return IntegrationConfig{cfg.control, cfg.xi_start, cfg.xi_end, cfg.stops};
}

GallerySolution gallery_for(const ProblemConfig& cfg, const QuadricAnsatz& a) {
  const double lo = std::min(cfg.xi_start, cfg.xi_end);
  const double hi = std::max(cfg.xi_start, cfg.xi_end);
  return gallery(cfg.gallery, cfg.params, a, cfg.lambda, lo, hi, cfg.gallery_nodes);
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw SolitonError(ErrorCode::ConfigInvalid, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const SolitonError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: ConfigInvalid: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

ProfileTable table_of(const ProblemConfig& cfg, const Profile& prof) {
  return ProfileTable{cfg.dim(), cfg.mode_string(), prof.nodes()};
}

void write_solve_outputs(const ProblemConfig& cfg, const SolveOutcome& o, std::ostream& out) {
  write_profile_csv(cfg.output.profile, table_of(cfg, o.profile));
  write_json(cfg.output.summary, o.summary);
  const auto& t = o.summary.at("termination");
  out << "profile: " << cfg.output.profile.string() << " (" << o.profile.nodes().size() << " rows)\n"
      << "summary: " << cfg.output.summary.string() << '\n'
      << "termination: " << t.at("status").get<std::string>();
  if (!t.at("event").is_null()) out << " (" << t.at("event").get<std::string>() << ")";
  out << " at xi = " << t.at("xi_stop").get<double>() << '\n';
}

}  // namespace

SolitonProblem problem_for(const ProblemConfig& cfg) {
  const QuadricAnsatz a = cfg.ansatz();
  if (cfg.mode == SolveMode::Gallery) return SolitonProblem{a, gallery_for(cfg, a).lambda};
  return SolitonProblem{a, cfg.lambda.value_or(0.0)};
}

SecondDerivativeModel model_for(const ProblemConfig& cfg, const SolitonProblem& p) {
  switch (cfg.mode) {
    case SolveMode::Theorem2: return reduced_model(p);
    case SolveMode::Theorem3: return special_model(p, cfg.special);
    case SolveMode::Gallery: return gallery_for(cfg, p.ansatz).profile.model();
  }
  throw SolitonError(ErrorCode::InvalidArgument, "unknown mode");
}

SolveOutcome run_solve(const ProblemConfig& cfg) {
  const QuadricAnsatz a = cfg.ansatz();
  SolitonProblem p{a, cfg.lambda.value_or(0.0)};
  std::optional<Profile> prof;
  switch (cfg.mode) {
    case SolveMode::Theorem2:
      prof = solve_reduced(p, cfg.initial, integration_config(cfg));
      break;
    case SolveMode::Theorem3:
      prof = solve_special(p, cfg.special, integration_config(cfg));
      break;
    case SolveMode::Gallery: {
      GallerySolution g = gallery_for(cfg, a);
      p.lambda = g.lambda;
      prof = std::move(g.profile);
      break;
    }
  }

  json summary;
  const ProfileTermination& t = prof->termination();
  summary["termination"] = {{"status", t.completed ? "completed" : "event"},
                            {"event", t.event ? json(event_name(*t.event)) : json(nullptr)},
                            {"xi_stop", t.xi_stop}};
  if (t.event) {
    const ReducedState last = prof->nodes().back();
    json ev = {{"xi", last.xi},
               {"phi", last.phi},
               {"dphi", last.dphi},
               {"f", last.f},
               {"df", last.df},
               {"singular_factor", a.singular_factor(last.xi)}};
    if (*t.event == EventKind::SingularLocus) {
      ev["singular_constraint_residual"] = number_or_null(singular_constraint_residual(p, last));
    }
    summary["event_data"] = ev;
  }
  summary["Lambda"] = a.lambda_constant();
  summary["lambda"] = p.lambda;
  summary["soliton_type"] = soliton_type(p.lambda);
  summary["invariance"] = invariance_json(a);
  summary["nodes"] = prof->nodes().size();
  summary["xi_range"] = {prof->xi_min(), prof->xi_max()};
  summary["config"] = resolved_config_json(cfg, p.lambda);
  return SolveOutcome{p, *prof, std::move(summary)};
}

ResidualReport run_verify(const ProblemConfig& cfg, const Profile& profile,
                          const VerifyOverrides& overrides) {
  const SolitonProblem p = problem_for(cfg);
  SampleSpec spec = cfg.sample;
  if (overrides.seed) spec.seed = *overrides.seed;
  if (overrides.points) spec.count = *overrides.points;
  return verify_profile(p, profile, spec, overrides.threshold.value_or(cfg.threshold));
}

int cmd_solve(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemConfig cfg = load_config(config);
    const SolveOutcome o = run_solve(cfg);
    write_solve_outputs(cfg, o, out);
    return kExitOk;
  });
}

int cmd_verify(const std::filesystem::path& config, const std::filesystem::path& profile,
               const VerifyOverrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemConfig cfg = load_config(config);
    ProfileTable table = read_profile_csv(profile);
    if (table.n != 0 && table.n != cfg.dim()) {
      throw SolitonError(ErrorCode::ProfileMalformed,
                         "profile has n = " + std::to_string(table.n) + " but config has n = " +
                             std::to_string(cfg.dim()));
    }
    const SolitonProblem p = problem_for(cfg);
    const Profile prof = Profile::from_table(std::move(table.nodes), model_for(cfg, p));
    const ResidualReport r = run_verify(cfg, prof, overrides);
    write_json(cfg.output.report, to_json(r));
    out << "report: " << cfg.output.report.string() << '\n'
        << "points: " << r.points_evaluated << "  max tensor: " << r.max_tensor
        << "  max diag: " << r.max_diag << "  max offdiag: " << r.max_offdiag
        << "  oracle gap: " << r.oracle_gap.max_gap << '\n'
        << "verdict: " << (r.pass ? "pass" : "fail") << '\n';
    return r.pass ? kExitOk : kExitVerifyFail;
  });
}

int cmd_gallery_list(std::ostream& out) {
  for (const auto& name : gallery_names()) out << name << '\n';
  return kExitOk;
}

int cmd_gallery_emit(const std::string& name, const std::filesystem::path& out_dir,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json doc = default_gallery_config(parse_gallery_name(name));
    std::filesystem::create_directories(out_dir);
    write_json(out_dir / "config.json", doc);
    const ProblemConfig cfg = parse_config(doc, out_dir);
    const SolveOutcome o = run_solve(cfg);
    write_solve_outputs(cfg, o, out);
    out << "config: " << (out_dir / "config.json").string() << '\n'
        << "lambda: " << o.problem.lambda << '\n';
    return kExitOk;
  });
}

}  // namespace soliton
