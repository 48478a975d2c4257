#include "soliton/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace soliton {
namespace {

using nlohmann::json;

class Errors {
 public:
  void add(const std::string& field, const std::string& msg) {
    items_.push_back("field '" + field + "': " + msg);
  }
  bool empty() const { return items_.empty(); }
  [[noreturn]] void raise() const {
    std::string all;
    for (const auto& s : items_) all += (all.empty() ? "" : "; ") + s;
    throw SolitonError(ErrorCode::ConfigInvalid, all);
  }

 private:
  std::vector<std::string> items_;
};

std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                             Errors& err) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    err.add(path + key, "expected a number");
    return std::nullopt;
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    err.add(path + key, "must be finite");
    return std::nullopt;
  }
  return d;
}

double number_or(const json& obj, const std::string& key, const std::string& path, Errors& err,
                 double fallback) {
  return number(obj, key, path, err).value_or(fallback);
}

double required_number(const json& obj, const std::string& key, const std::string& path,
                       Errors& err) {
  if (!obj.contains(key)) {
    err.add(path + key, "is required");
    return 0.0;
  }
  return number(obj, key, path, err).value_or(0.0);
}

std::vector<double> number_list(const json& obj, const std::string& key, Errors& err) {
  std::vector<double> out;
  const json& v = obj.at(key);
  if (!v.is_array()) {
    err.add(key, "expected an array of numbers");
    return out;
  }
  for (const auto& e : v) {
    if (!e.is_number()) {
      err.add(key, "expected an array of numbers");
      return {};
    }
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& path, Errors& err) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.contains(it.key())) err.add(path + it.key(), "unknown key");
  }
}

const json& object_or_empty(const json& doc, const std::string& key, Errors& err) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) {
    err.add(key, "expected an object");
    return empty;
  }
  return doc.at(key);
}

}  // namespace

QuadricAnsatz ProblemConfig::ansatz() const {
  Vector a = Eigen::Map<const Vector>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  Vector b = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  return QuadricAnsatz(Signature(epsilon), tau, a, b);
}

std::string ProblemConfig::mode_string() const {
  switch (mode) {
    case SolveMode::Theorem2: return "theorem2";
    case SolveMode::Theorem3: return "theorem3";
    case SolveMode::Gallery: return "gallery:" + gallery_name(gallery);
  }
  return "unknown";
}

ProblemConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SolitonError(ErrorCode::ConfigInvalid, "config must be a JSON object");
  Errors err;
  reject_unknown_keys(doc,
                      {"n", "epsilon", "tau", "alpha", "beta", "lambda", "mode", "initial", "params",
                       "xi_span", "tolerances", "events", "gallery_nodes", "sample", "threshold",
                       "output"},
                      "", err);
  ProblemConfig cfg;

  std::size_t n = 0;
  if (!doc.contains("n") || !doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 2) {
    err.add("n", "required integer >= 2");
  } else {
    n = static_cast<std::size_t>(doc.at("n").get<long long>());
  }

  if (!doc.contains("epsilon") || !doc.at("epsilon").is_array()) {
    err.add("epsilon", "required array of +1/-1");
  } else {
    bool plus = false;
    for (const auto& e : doc.at("epsilon")) {
      if (!e.is_number_integer() || (e.get<int>() != 1 && e.get<int>() != -1)) {
        err.add("epsilon", "entries must be +1 or -1");
        break;
      }
      cfg.epsilon.push_back(e.get<int>());
      plus = plus || e.get<int>() == 1;
    }
    if (n != 0 && cfg.epsilon.size() != n) {
      err.add("epsilon", "length " + std::to_string(cfg.epsilon.size()) + " != n = " + std::to_string(n));
    }
    if (!cfg.epsilon.empty() && !plus) err.add("epsilon", "needs at least one +1");
  }

  cfg.tau = required_number(doc, "tau", "", err);
  for (const char* key : {"alpha", "beta"}) {
    std::vector<double>& dst = std::string(key) == "alpha" ? cfg.alpha : cfg.beta;
    if (doc.contains(key)) {
      dst = number_list(doc, key, err);
      if (n != 0 && dst.size() != n) {
        err.add(key, "length " + std::to_string(dst.size()) + " != n = " + std::to_string(n));
      }
    } else {
      dst.assign(n, 0.0);
    }
  }
  cfg.lambda = number(doc, "lambda", "", err);

  std::string mode;
  if (!doc.contains("mode") || !doc.at("mode").is_string()) {
    err.add("mode", "required: theorem2 | theorem3 | gallery:<name>");
  } else {
    mode = doc.at("mode").get<std::string>();
    if (mode == "theorem2") {
      cfg.mode = SolveMode::Theorem2;
    } else if (mode == "theorem3") {
      cfg.mode = SolveMode::Theorem3;
    } else if (mode.rfind("gallery:", 0) == 0) {
      cfg.mode = SolveMode::Gallery;
      try {
        cfg.gallery = parse_gallery_name(mode.substr(8));
      } catch (const SolitonError&) {
        err.add("mode", "unknown gallery entry '" + mode.substr(8) + "'");
      }
    } else {
      err.add("mode", "unknown mode '" + mode + "'");
    }
  }

  const json& initial = object_or_empty(doc, "initial", err);
  if (cfg.mode == SolveMode::Theorem2) {
    reject_unknown_keys(initial, {"phi0", "dphi0", "f0", "df0"}, "initial.", err);
    cfg.initial.phi = required_number(initial, "phi0", "initial.", err);
    cfg.initial.dphi = required_number(initial, "dphi0", "initial.", err);
    cfg.initial.f = number_or(initial, "f0", "initial.", err, 0.0);
    cfg.initial.df = required_number(initial, "df0", "initial.", err);
  } else if (cfg.mode == SolveMode::Theorem3) {
    reject_unknown_keys(initial, {"c1", "c2", "h0", "f0"}, "initial.", err);
    cfg.special.c1 = required_number(initial, "c1", "initial.", err);
    cfg.special.c2 = required_number(initial, "c2", "initial.", err);
    cfg.special.h0 = required_number(initial, "h0", "initial.", err);
    cfg.special.f0 = number_or(initial, "f0", "initial.", err, 0.0);
    if (!(cfg.special.h0 > 0.0)) err.add("initial.h0", "must be positive");
    if (cfg.tau == 0.0) err.add("tau", "theorem3 needs tau != 0");
  } else if (!initial.empty()) {
    err.add("initial", "not used in gallery mode (use 'params')");
  }
  const json& params = object_or_empty(doc, "params", err);
  if (cfg.mode == SolveMode::Gallery) {
    for (auto it = params.begin(); it != params.end(); ++it) {
      if (!it.value().is_number()) {
        err.add("params." + it.key(), "expected a number");
      } else {
        cfg.params[it.key()] = it.value().get<double>();
      }
    }
  } else if (!params.empty()) {
    err.add("params", "only used in gallery mode");
  }

  if (!doc.contains("xi_span")) {
    err.add("xi_span", "required [start, end]");
  } else {
    const auto span = number_list(doc, "xi_span", err);
    if (span.size() != 2 || !(span[0] != span[1])) {
      err.add("xi_span", "expected two distinct numbers");
    } else {
      cfg.xi_start = span[0];
      cfg.xi_end = span[1];
      if (cfg.mode == SolveMode::Gallery && !(span[1] > span[0])) {
        err.add("xi_span", "gallery ranges must be increasing");
      }
    }
  }

  const json& tol = object_or_empty(doc, "tolerances", err);
  reject_unknown_keys(tol, {"rel_tol", "abs_tol", "max_step", "max_steps"}, "tolerances.", err);
  cfg.control.rel_tol = number_or(tol, "rel_tol", "tolerances.", err, cfg.control.rel_tol);
  cfg.control.abs_tol = number_or(tol, "abs_tol", "tolerances.", err, cfg.control.abs_tol);
  cfg.control.max_step = number_or(tol, "max_step", "tolerances.", err, 0.0);
  cfg.control.max_steps = static_cast<std::size_t>(
      number_or(tol, "max_steps", "tolerances.", err, static_cast<double>(cfg.control.max_steps)));
  if (!(cfg.control.rel_tol > 0.0)) err.add("tolerances.rel_tol", "must be positive");
  if (!(cfg.control.abs_tol > 0.0)) err.add("tolerances.abs_tol", "must be positive");

  const json& ev = object_or_empty(doc, "events", err);
  reject_unknown_keys(ev, {"phi_floor", "singular_guard", "blowup"}, "events.", err);
  cfg.stops.phi_floor = number_or(ev, "phi_floor", "events.", err, cfg.stops.phi_floor);
  cfg.stops.singular_guard = number_or(ev, "singular_guard", "events.", err, cfg.stops.singular_guard);
  cfg.stops.blowup = number_or(ev, "blowup", "events.", err, cfg.stops.blowup);
  if (!(cfg.stops.phi_floor > 0.0)) err.add("events.phi_floor", "must be positive");
  if (!(cfg.stops.singular_guard > kTolSingular)) {
    err.add("events.singular_guard", "must exceed the singular tolerance 1e-10");
  }

  if (doc.contains("gallery_nodes")) {
    if (!doc.at("gallery_nodes").is_number_integer() || doc.at("gallery_nodes").get<long long>() < 2) {
      err.add("gallery_nodes", "integer >= 2");
    } else {
      cfg.gallery_nodes = static_cast<std::size_t>(doc.at("gallery_nodes").get<long long>());
    }
  }

  const json& sample = object_or_empty(doc, "sample", err);
  reject_unknown_keys(sample, {"mode", "seed", "count", "box", "min_phi", "min_singular"}, "sample.",
                      err);
  if (sample.contains("mode")) {
    const auto m = sample.at("mode").is_string() ? sample.at("mode").get<std::string>() : "";
    if (m == "random") {
      cfg.sample.mode = SampleMode::Random;
    } else if (m == "grid") {
      cfg.sample.mode = SampleMode::Grid;
    } else {
      err.add("sample.mode", "random | grid");
    }
  }
  if (sample.contains("seed")) {
    if (!sample.at("seed").is_number_integer() || sample.at("seed").get<long long>() < 0) {
      err.add("sample.seed", "non-negative integer");
    } else {
      cfg.sample.seed = sample.at("seed").get<std::uint64_t>();
    }
  }
  if (sample.contains("count")) {
    if (!sample.at("count").is_number_integer() || sample.at("count").get<long long>() < 1) {
      err.add("sample.count", "integer >= 1");
    } else {
      cfg.sample.count = static_cast<std::size_t>(sample.at("count").get<long long>());
    }
  }
  if (sample.contains("box")) {
    const json& box = sample.at("box");
    bool ok = box.is_array() && (n == 0 || box.size() == n);
    if (ok) {
      for (const auto& iv : box) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number() ||
            !(iv[1].get<double>() > iv[0].get<double>())) {
          ok = false;
          break;
        }
        cfg.sample.box.emplace_back(iv[0].get<double>(), iv[1].get<double>());
      }
    }
    if (!ok) err.add("sample.box", "expected n intervals [lo, hi] with lo < hi");
  } else {
    cfg.sample.box.assign(n, {-1.0, 1.0});
  }
  cfg.sample.min_phi = number_or(sample, "min_phi", "sample.", err, cfg.sample.min_phi);
  cfg.sample.min_singular = number_or(sample, "min_singular", "sample.", err, cfg.sample.min_singular);

  cfg.threshold = number_or(doc, "threshold", "", err, kDefaultThreshold);
  if (!(cfg.threshold > 0.0)) err.add("threshold", "must be positive");

  const json& out = object_or_empty(doc, "output", err);
  reject_unknown_keys(out, {"profile", "summary", "report"}, "output.", err);
  auto path_of = [&](const char* key, const char* fallback) {
    std::filesystem::path p = fallback;
    if (out.contains(key)) {
      if (!out.at(key).is_string()) {
        err.add(std::string("output.") + key, "expected a string path");
      } else {
        p = out.at(key).get<std::string>();
      }
    }
    return p.is_absolute() ? p : base_dir / p;
  };
  cfg.output.profile = path_of("profile", "profile.csv");
  cfg.output.summary = path_of("summary", "summary.json");
  cfg.output.report = path_of("report", "report.json");

  if (!err.empty()) err.raise();

  try {
    (void)cfg.ansatz();
  } catch (const SolitonError& e) {
    Errors e2;
    e2.add("tau/alpha", e.what());
    e2.raise();
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SolitonError(ErrorCode::ConfigInvalid, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SolitonError(ErrorCode::ConfigInvalid, std::string("JSON parse error: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json resolved_config_json(const ProblemConfig& cfg, double resolved_lambda) {
  json j;
  j["n"] = cfg.dim();
  j["epsilon"] = cfg.epsilon;
  j["tau"] = cfg.tau;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["lambda"] = resolved_lambda;
  j["Lambda"] = cfg.ansatz().lambda_constant();
  j["mode"] = cfg.mode_string();
  switch (cfg.mode) {
    case SolveMode::Theorem2:
      j["initial"] = {{"phi0", cfg.initial.phi},
                      {"dphi0", cfg.initial.dphi},
                      {"f0", cfg.initial.f},
                      {"df0", cfg.initial.df}};
      break;
    case SolveMode::Theorem3:
      j["initial"] = {{"c1", cfg.special.c1},
                      {"c2", cfg.special.c2},
                      {"h0", cfg.special.h0},
                      {"f0", cfg.special.f0}};
      break;
    case SolveMode::Gallery:
      j["params"] = cfg.params;
      j["gallery_nodes"] = cfg.gallery_nodes;
      break;
  }
  j["xi_span"] = {cfg.xi_start, cfg.xi_end};
  j["tolerances"] = {{"rel_tol", cfg.control.rel_tol},
                     {"abs_tol", cfg.control.abs_tol},
                     {"max_step", cfg.control.max_step > 0.0
                                      ? cfg.control.max_step
                                      : std::abs(cfg.xi_end - cfg.xi_start) / 200.0},
                     {"max_steps", cfg.control.max_steps}};
  j["events"] = {{"phi_floor", cfg.stops.phi_floor},
                 {"singular_guard", cfg.stops.singular_guard},
                 {"blowup", cfg.stops.blowup}};
  json box = json::array();
  for (const auto& [lo, hi] : cfg.sample.box) box.push_back({lo, hi});
  j["sample"] = {{"mode", cfg.sample.mode == SampleMode::Grid ? "grid" : "random"},
                 {"seed", cfg.sample.seed},
                 {"count", cfg.sample.count},
                 {"box", box},
                 {"min_phi", cfg.sample.min_phi},
                 {"min_singular", cfg.sample.min_singular}};
  j["threshold"] = cfg.threshold;
  j["output"] = {{"profile", cfg.output.profile.string()},
                 {"summary", cfg.output.summary.string()},
                 {"report", cfg.output.report.string()}};
  return j;
}

json default_gallery_config(GalleryName name) {
  json j;
  j["mode"] = "gallery:" + gallery_name(name);
  j["sample"] = {{"mode", "random"}, {"seed", 1}, {"count", 500}};
  switch (name) {
    case GalleryName::Gaussian:
      j["n"] = 3;
      j["epsilon"] = {1, 1, 1};
      j["tau"] = 1.0;
      j["lambda"] = 2.0;
      j["params"] = {{"k", 1.0}, {"a2", 0.0}};
      j["xi_span"] = {0.0, 12.0};
      j["sample"]["box"] = {{-2, 2}, {-2, 2}, {-2, 2}};
      break;
    case GalleryName::Cigar:
      j["n"] = 2;
      j["epsilon"] = {1, 1};
      j["tau"] = 1.0;
      j["lambda"] = 0.0;
      j["params"] = json::object();
      j["xi_span"] = {0.0, 10.0};
      j["sample"]["box"] = {{-2, 2}, {-2, 2}};
      break;
    case GalleryName::SpaceForm:
      j["n"] = 3;
      j["epsilon"] = {1, 1, 1};
      j["tau"] = 1.0;
      j["params"] = {{"b1", 1.0}, {"b2", 1.0}, {"f0", 0.0}};
      j["xi_span"] = {0.0, 12.0};
      j["sample"]["box"] = {{-2, 2}, {-2, 2}, {-2, 2}};
      break;
    case GalleryName::N2Polynomial:
      j["n"] = 2;
      j["epsilon"] = {1, 1};
      j["tau"] = 1.0;
      j["lambda"] = 0.0;
      j["params"] = {{"c1", -2.0}, {"c2", 0.0}, {"c3", 1.0}, {"f0", 0.0}};
      j["xi_span"] = {0.0, 10.0};
      j["sample"]["box"] = {{-2, 2}, {-2, 2}};
      break;
  }
  j["alpha"] = json::array();
  j["beta"] = json::array();
  for (int k = 0; k < j["n"].get<int>(); ++k) {
    j["alpha"].push_back(0.0);
    j["beta"].push_back(0.0);
  }
  return j;
}

}  // namespace soliton
