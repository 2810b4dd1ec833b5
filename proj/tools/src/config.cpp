#include "config.hpp"

#include "tailrisk/errors.hpp"

#include <cmath>
#include <set>

namespace tailrisk::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

double number(const json& j, const std::string& key, const std::string& path, std::optional<double> fallback = {}) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where, "missing field");
  }
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  // Euler's number is a common scale for the log-corrected families.
  if (v.is_string() && v.get<std::string>() == "e") return std::exp(1.0);
  throw ConfigError(where, "expected a number");
}

std::string text(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(path.empty() ? key : path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<TailLaw> parse_laws(const json& doc, const char* key, std::size_t n) {
  if (!doc.contains(key)) throw ConfigError(key, "missing section");
  const json& arr = doc.at(key);
  if (!arr.is_array() || arr.empty()) throw ConfigError(key, "expected a non-empty array");
  std::vector<TailLaw> laws;
  for (std::size_t i = 0; i < arr.size(); ++i) laws.push_back(parse_law(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  if (laws.size() == 1) laws.assign(n, laws.front());
  if (laws.size() != n) throw ConfigError(key, "expected 1 or n = " + std::to_string(n) + " entries");
  return laws;
}

Which parse_which(const std::string& s) {
  if (s == "S") return Which::S;
  if (s == "M") return Which::M;
  throw ConfigError("run.which", "expected S or M");
}

}  // namespace

Theorem parse_theorem(std::string_view name) {
  if (name == "theorem1") return Theorem::theorem1;
  if (name == "theorem2") return Theorem::theorem2;
  if (name == "weighted") return Theorem::weighted;
  if (name == "corollary1") return Theorem::corollary1;
  if (name == "corollary2") return Theorem::corollary2;
  throw ConfigError("run.theorem", "unknown theorem '" + std::string(name) + "'");
}

std::string_view theorem_name(Theorem t) noexcept {
  switch (t) {
    case Theorem::theorem1: return "theorem1";
    case Theorem::theorem2: return "theorem2";
    case Theorem::weighted: return "weighted";
    case Theorem::corollary1: return "corollary1";
    case Theorem::corollary2: return "corollary2";
  }
  return "?";
}

TailLaw parse_law(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("family")) throw ConfigError(path + ".family", "missing field");
  const std::string fam = text(j, "family", path, "");
  return with_path(path, [&]() -> TailLaw {
    if (fam == "pareto") {
      only_keys(j, path, {"family", "alpha", "x0"});
      return TailLaw::pareto(number(j, "alpha", path), number(j, "x0", path, 1.0));
    }
    if (fam == "log_power_pareto") {
      only_keys(j, path, {"family", "alpha", "gamma", "x0", "sv_scale"});
      return TailLaw::log_power_pareto(number(j, "alpha", path), number(j, "gamma", path), number(j, "x0", path, 1.0),
                                       number(j, "sv_scale", path, 1.0));
    }
    if (fam == "log_factor_pareto") {
      only_keys(j, path, {"family", "alpha", "beta", "x0"});
      return TailLaw::log_factor_pareto(number(j, "alpha", path), number(j, "beta", path), number(j, "x0", path));
    }
    if (fam == "super_heavy_log") {
      only_keys(j, path, {"family", "beta", "x0"});
      return TailLaw::super_heavy_log(number(j, "beta", path), number(j, "x0", path));
    }
    if (fam == "lognormal") {
      only_keys(j, path, {"family", "mu", "sigma"});
      return TailLaw::lognormal(number(j, "mu", path, 0.0), number(j, "sigma", path));
    }
    if (fam == "point_mass") {
      only_keys(j, path, {"family", "value"});
      return TailLaw::point_mass(number(j, "value", path));
    }
    if (fam == "shifted" || fam == "negated") {
      only_keys(j, path, {"family", "base", "shift"});
      if (!j.contains("base")) throw ConfigError(path + ".base", "missing field");
      const TailLaw base = parse_law(j.at("base"), path + ".base");
      const double shift = number(j, "shift", path, 0.0);
      return fam == "shifted" ? TailLaw::shifted(base, shift) : TailLaw::negated(base, shift);
    }
    throw ConfigError(path + ".family", "unknown family '" + fam + "'");
  });
}

json law_to_json(const TailLaw& law) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Pareto>) return {{"family", "pareto"}, {"alpha", p.alpha}, {"x0", p.x0}};
        else if constexpr (std::is_same_v<T, LogPowerPareto>)
          return {{"family", "log_power_pareto"}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"x0", p.x0}, {"sv_scale", p.sv_scale}};
        else if constexpr (std::is_same_v<T, LogFactorPareto>)
          return {{"family", "log_factor_pareto"}, {"alpha", p.alpha}, {"beta", p.beta}, {"x0", p.x0}};
        else if constexpr (std::is_same_v<T, SuperHeavyLog>) return {{"family", "super_heavy_log"}, {"beta", p.beta}, {"x0", p.x0}};
        else if constexpr (std::is_same_v<T, Lognormal>) return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
        else if constexpr (std::is_same_v<T, PointMass>) return {{"family", "point_mass"}, {"value", p.value}};
        else return {{"family", p.negate ? "negated" : "shifted"}, {"base", law_to_json(*p.base)}, {"shift", p.shift}};
      },
      law.params());
}

bool Config::iid() const {
  for (std::size_t i = 1; i < spec.n(); ++i) {
    if (law_to_json(spec.x_laws[i]) != law_to_json(spec.x_laws[0])) return false;
    if (law_to_json(spec.y_laws[i]) != law_to_json(spec.y_laws[0])) return false;
  }
  return spec.x_dependence == Dependence::independent;
}

Config parse_config(const json& doc) {
  only_keys(doc, "", {"model", "x_laws", "y_laws", "weights", "run"});
  Config cfg;
  const json model = doc.value("model", json::object());
  only_keys(model, "model", {"n", "dependence", "weight_bounds"});
  if (!model.contains("n")) throw ConfigError("model.n", "missing field");
  if (!model.at("n").is_number_integer() || model.at("n").get<long long>() < 1) {
    throw ConfigError("model.n", "expected a positive integer");
  }
  const auto n = model.at("n").get<std::size_t>();

  cfg.spec.y_laws = parse_laws(doc, "y_laws", n);
  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    if (!w.is_array() || w.size() != n) throw ConfigError("weights", "expected n numbers");
    std::vector<double> c;
    for (std::size_t i = 0; i < n; ++i) {
      if (!w[i].is_number()) throw ConfigError("weights[" + std::to_string(i) + "]", "expected a number");
      c.push_back(w[i].get<double>());
    }
    if (doc.contains("x_laws")) throw ConfigError("x_laws", "not allowed together with weights");
    WeightBounds b{*std::min_element(c.begin(), c.end()), *std::max_element(c.begin(), c.end())};
    if (model.contains("weight_bounds")) {
      const json& wb = model.at("weight_bounds");
      if (!wb.is_array() || wb.size() != 2 || !wb[0].is_number() || !wb[1].is_number()) {
        throw ConfigError("model.weight_bounds", "expected [a, b]");
      }
      b = {wb[0].get<double>(), wb[1].get<double>()};
    }
    cfg.spec = with_path("weights", [&] { return ModelSpec::weighted(cfg.spec.y_laws, c, b); });
  } else {
    cfg.spec.x_laws = parse_laws(doc, "x_laws", n);
  }
  const std::string dep = text(model, "dependence", "model", "independent");
  if (dep == "independent") cfg.spec.x_dependence = Dependence::independent;
  else if (dep == "comonotone") cfg.spec.x_dependence = Dependence::comonotone;
  else throw ConfigError("model.dependence", "expected independent or comonotone");
  with_path("model", [&] { cfg.spec.validate(); });

  const json run = doc.value("run", json::object());
  only_keys(run, "run",
            {"seed", "workers", "budget", "x", "grid", "method", "which", "variant", "theorem", "estimator", "base",
             "tolerance", "theta", "target"});
  RunSettings& r = cfg.run;
  auto integer = [&](const char* key, auto& out) {
    if (!run.contains(key)) return;
    const json& v = run.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(std::string("run.") + key, "expected a non-negative integer");
    out = v.get<std::remove_reference_t<decltype(out)>>();
  };
  integer("seed", r.seed);
  integer("workers", r.workers);
  integer("budget", r.budget);
  if (run.contains("x")) r.x = number(run, "x", "run");
  if (run.contains("grid")) {
    r.grid_text = text(run, "grid", "run", "");
    r.grid = parse_grid(r.grid_text);
  }
  if (run.contains("method")) r.method = parse_method(text(run, "method", "run", ""));
  if (run.contains("which")) r.which = parse_which(text(run, "which", "run", "S"));
  if (run.contains("variant")) r.variant = parse_variant(text(run, "variant", "run", ""));
  if (run.contains("theorem")) r.theorem = parse_theorem(text(run, "theorem", "run", ""));
  if (run.contains("estimator")) r.estimator = parse_tail_source(text(run, "estimator", "run", ""));
  if (run.contains("base")) r.base = parse_base_method(text(run, "base", "run", ""));
  if (run.contains("tolerance")) r.tolerance = number(run, "tolerance", "run");
  if (run.contains("theta") && !run.at("theta").is_null()) r.theta = number(run, "theta", "run");
  if (run.contains("target")) {
    const std::string t = text(run, "target", "run", "model");
    if (t != "model" && t != "product") throw ConfigError("run.target", "expected model or product");
    r.product = t == "product";
  }
  refresh_resolved(cfg);
  return cfg;
}

void refresh_resolved(Config& cfg) {
  const ModelSpec& s = cfg.spec;
  const RunSettings& r = cfg.run;
  json doc;
  doc["model"] = {{"n", s.n()}, {"dependence", s.x_dependence == Dependence::comonotone ? "comonotone" : "independent"}};
  json ys = json::array();
  for (const TailLaw& l : s.y_laws) ys.push_back(law_to_json(l));
  doc["y_laws"] = ys;
  if (s.weights) {
    doc["weights"] = *s.weights;
    doc["model"]["weight_bounds"] = {s.weight_bounds->lower, s.weight_bounds->upper};
  } else {
    json xs = json::array();
    for (const TailLaw& l : s.x_laws) xs.push_back(law_to_json(l));
    doc["x_laws"] = xs;
  }
  json run = {{"seed", r.seed},
              {"workers", r.workers},
              {"budget", r.budget},
              {"method", method_name(r.method)},
              {"which", r.which == Which::S ? "S" : "M"},
              {"variant", variant_name(r.variant)},
              {"estimator", tail_source_name(r.estimator)},
              {"base", base_method_name(r.base)},
              {"tolerance", r.tolerance},
              {"target", r.product ? "product" : "model"}};
  if (r.x) run["x"] = *r.x;
  if (!r.grid_text.empty()) run["grid"] = r.grid_text;
  if (r.theorem) run["theorem"] = theorem_name(*r.theorem);
  if (r.theta) run["theta"] = *r.theta;
  doc["run"] = run;
  cfg.resolved = doc;
}

}  // namespace tailrisk::cli
