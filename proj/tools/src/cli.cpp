#include "cli.hpp"

#include "config.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace tailrisk::cli {

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> budget;
  std::optional<double> x;
  std::optional<std::string> grid, method, out, which, variant, theorem, estimator, base;
};

Config load(const Flags& f) {
  std::ifstream in(f.config);
  if (!in) throw ConfigError("", "cannot open config file '" + f.config + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  Config cfg = parse_config(doc);
  RunSettings& r = cfg.run;
  if (f.seed) r.seed = *f.seed;
  if (f.workers) r.workers = *f.workers;
  if (f.budget) r.budget = *f.budget;
  if (f.x) r.x = *f.x;
  if (f.grid) {
    r.grid_text = *f.grid;
    r.grid = parse_grid(*f.grid);
  }
  if (f.method) r.method = parse_method(*f.method);
  if (f.which) {
    if (*f.which != "S" && *f.which != "M") throw ConfigError("run.which", "expected S or M");
    r.which = *f.which == "S" ? Which::S : Which::M;
  }
  if (f.variant) r.variant = parse_variant(*f.variant);
  if (f.theorem) r.theorem = parse_theorem(*f.theorem);
  if (f.estimator) r.estimator = parse_tail_source(*f.estimator);
  if (f.base) r.base = parse_base_method(*f.base);
  refresh_resolved(cfg);
  return cfg;
}

double require_x(const Config& cfg) {
  if (!cfg.run.x) throw ConfigError("run.x", "threshold required (config or --x)");
  return *cfg.run.x;
}

std::vector<std::string> provenance(const Config& cfg) {
  return {"config: " + cfg.resolved.dump(), "seed: " + std::to_string(cfg.run.seed)};
}

json with_provenance(const Config& cfg, json body) {
  json out = {{"config", cfg.resolved}, {"seed", cfg.run.seed}};
  out.update(body);
  return out;
}

json base_json(const BaseTail& b) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductOfY>) return {{"kind", "ProductOfY"}, {"i", v.i}};
        else if constexpr (std::is_same_v<T, XProduct>) return {{"kind", "XProduct"}, {"i", v.i}};
        else if constexpr (std::is_same_v<T, PlainG>) return {{"kind", "PlainG"}, {"i", v.i}};
        else return {{"kind", "YTimes"}, {"i", v.i}, {"z", law_to_json(v.z)}};
      },
      b);
}

Theorem chosen_theorem(const Config& cfg) {
  if (cfg.run.theorem) return *cfg.run.theorem;
  return cfg.spec.weights ? Theorem::weighted : Theorem::theorem2;
}

IidConstants iid_constants(const Config& cfg) {
  if (!cfg.iid() || cfg.spec.weights) throw ConfigError("x_laws", "corollary1 needs iid insurance and financial risks");
  return corollary1_constants(cfg.spec.x_laws[0], cfg.spec.y_laws[0], cfg.spec.n(), cfg.run.theta, cfg.mc());
}

Coefficient weighted_constant(const Config& cfg) {
  if (!cfg.spec.weights || !cfg.iid()) throw ConfigError("weights", "corollary2 needs weights and iid y_laws");
  return corollary2_constant(cfg.spec.y_laws[0], *cfg.spec.weights, cfg.mc());
}

// Expansion for every theorem except theorem1, which is a single formula.
Expansion build_expansion(const Config& cfg, Theorem t) {
  const ModelSpec& s = cfg.spec;
  switch (t) {
    case Theorem::theorem2: return theorem2_expansion(s, cfg.run.which, cfg.run.variant, cfg.mc());
    case Theorem::weighted:
      if (!s.weights) throw ConfigError("weights", "weighted expansion needs weights");
      return weighted_sum_expansion(s.y_laws, *s.weights, *s.weight_bounds, cfg.mc());
    case Theorem::corollary1: {
      const IidConstants c = iid_constants(cfg);
      return Expansion{{{cfg.run.which == Which::S ? c.k : c.l, PlainG{1}}}};
    }
    case Theorem::corollary2: return Expansion{{{weighted_constant(cfg), PlainG{1}}}};
    case Theorem::theorem1: break;
  }
  throw ConfigError("run.theorem", "theorem1 has no term expansion");
}

class Output {
public:
  Output(const std::optional<std::string>& path, std::ostream& fallback) : fallback_(fallback) {
    if (path) {
      file_.open(*path, std::ios::binary);
      if (!file_) throw ConfigError("", "cannot write '" + *path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }
  bool to_file() const { return file_.is_open(); }

private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_simulate(const Config& cfg, const Flags& f, std::ostream& out) {
  const auto samples = simulate(cfg.spec, cfg.run.budget, cfg.run.seed, cfg.run.workers);
  Output o(f.out, out);
  for (const std::string& h : provenance(cfg)) o.stream() << "# " << h << '\n';
  write_samples_csv(o.stream(), samples);
  return 0;
}

int cmd_tail(const Config& cfg, const Flags& f, std::ostream& out) {
  const double x = require_x(cfg);
  const TailEstimate e = estimate_tail(cfg.spec, cfg.run.which, x, cfg.run.method, cfg.mc());
  Output o(f.out, out);
  o.stream() << with_provenance(cfg, {{"x", e.x},
                                      {"which", cfg.run.which == Which::S ? "S" : "M"},
                                      {"p_hat", e.p_hat},
                                      {"stderr", e.std_error},
                                      {"method", method_name(e.method)},
                                      {"n_samples", e.n_samples}})
                    .dump(2)
             << '\n';
  return 0;
}

int cmd_oracle(const Config& cfg, const Flags& f, std::ostream& out) {
  const double x = require_x(cfg);
  const oracle::Exact r = cfg.run.product ? oracle::product_tail(cfg.spec.y_laws, x)
                                          : oracle::model_tail(cfg.spec, cfg.run.which, x);
  Output o(f.out, out);
  json body = {{"x", x}, {"value", r.value}, {"error", r.error}, {"target", cfg.run.product ? "product" : "model"}};
  if (!cfg.run.product) body["which"] = cfg.run.which == Which::S ? "S" : "M";
  o.stream() << with_provenance(cfg, body).dump(2) << '\n';
  return 0;
}

int cmd_asympt(const Config& cfg, const Flags& f, std::ostream& out) {
  const Theorem t = chosen_theorem(cfg);
  json body = {{"theorem", theorem_name(t)}, {"which", cfg.run.which == Which::S ? "S" : "M"}};
  if (t == Theorem::theorem1) {
    const double x = require_x(cfg);
    body["x"] = x;
    body["asymptote"] = theorem1_tail(cfg.spec, x);
  } else {
    if (t == Theorem::theorem2) body["variant"] = variant_name(cfg.run.variant);
    const Expansion e = build_expansion(cfg, t);
    json terms = json::array();
    for (const Term& term : e.terms) {
      terms.push_back({{"coefficient", term.coefficient.value}, {"stderr", term.coefficient.std_error}, {"base", base_json(term.base)}});
    }
    body["terms"] = terms;
    if (cfg.run.x) {
      const Evaluation v = evaluate_expansion(e, cfg.spec, *cfg.run.x, cfg.run.base, cfg.mc());
      body["x"] = *cfg.run.x;
      body["value"] = v.value;
      body["error"] = v.error;
    }
  }
  Output o(f.out, out);
  o.stream() << with_provenance(cfg, body).dump(2) << '\n';
  return 0;
}

int cmd_constants(const Config& cfg, const Flags& f, std::ostream& out) {
  const ModelSpec& s = cfg.spec;
  const std::size_t n = s.n();
  std::ostringstream csv;
  csv.precision(12);
  csv << "name,i,value,stderr,validity\n";
  auto row = [&](const std::string& name, std::size_t i, double v, double se, std::string_view validity) {
    csv << name << ',' << i << ',' << v << ',' << se << ',' << validity << '\n';
  };
  const double alpha = s.y_laws.front().alpha();
  if (s.weights) {
    const Expansion e = weighted_sum_expansion(s.y_laws, *s.weights, *s.weight_bounds, cfg.mc());
    for (const Term& t : e.terms) row("A", std::get<ProductOfY>(t.base).i, t.coefficient.value, t.coefficient.std_error, "");
    if (cfg.iid() && log_convolution_equivalent(s.y_laws[0])) {
      const Coefficient c = weighted_constant(cfg);
      row("C", n, c.value, c.std_error, "");
    }
  } else {
    for (std::size_t i = 1; i <= n; ++i) {
      const MomentEstimate b = paired_difference_moment(s, i, alpha, cfg.mc(), {Which::S, false, false});
      row("B", i, b.value, b.std_error, validity_name(b.validity));
    }
    for (std::size_t i = 1; i <= n; ++i) {
      const MomentEstimate d = paired_difference_moment(s, i, alpha, cfg.mc(), {Which::M, false, false});
      row("D", i, d.value, d.std_error, validity_name(d.validity));
    }
    if (cfg.iid() && log_convolution_equivalent(s.y_laws[0])) {
      const IidConstants c = iid_constants(cfg);
      row("K", n, c.k.value, c.k.std_error, "");
      row("L", n, c.l.value, c.l.std_error, "");
    }
  }
  Output o(f.out, out);
  for (const std::string& h : provenance(cfg)) o.stream() << "# " << h << '\n';
  o.stream() << csv.str();
  return 0;
}

int cmd_compare(const Config& cfg, const Flags& f, std::ostream& out) {
  if (cfg.run.grid.empty()) throw ConfigError("run.grid", "compare needs a grid (config or --grid)");
  const Theorem t = chosen_theorem(cfg);
  RatioOptions opt;
  opt.estimator = cfg.run.estimator;
  opt.method = cfg.run.method;
  opt.base = cfg.run.base;
  opt.mc = cfg.mc();
  opt.tolerance = cfg.run.tolerance;
  RatioTable table;
  if (t == Theorem::theorem1) {
    if (cfg.run.grid.size() < 4) throw DomainError("ratio_table: grid needs at least 4 points");
    const auto estimate = [&](double x) -> Valued {
      if (opt.estimator == TailSource::oracle) {
        const oracle::Exact r = oracle::model_tail(cfg.spec, cfg.run.which, x);
        return {r.value, r.error};
      }
      const TailEstimate r = estimate_tail(cfg.spec, cfg.run.which, x, opt.method, opt.mc);
      return {r.p_hat, r.std_error};
    };
    const auto asym = [&](double x) -> Valued { return {theorem1_tail(cfg.spec, x), 0.0}; };
    table = build_ratio_table(cfg.run.grid, estimate, asym, opt.estimator == TailSource::oracle ? 1.0 : 3.0, opt.tolerance);
  } else {
    table = ratio_table(cfg.spec, cfg.run.which, build_expansion(cfg, t), cfg.run.grid, opt);
  }
  const Extrapolation ex = extrapolate_limit(table);
  Output o(f.out, out);
  write_ratio_csv(o.stream(), table, provenance(cfg));
  std::ostringstream line;
  line.precision(6);
  line << "verdict: " << (table.verdict.pass ? "pass" : "fail") << " final_ratio_error=" << table.verdict.final_ratio_error
       << " trend=" << (table.verdict.trend ? "decreasing" : "not-decreasing") << " limit=" << ex.limit
       << (ex.low_confidence ? " (low confidence)" : "");
  if (o.to_file()) o.stream() << "# " << line.str() << '\n';
  out << line.str() << '\n';
  return table.verdict.pass ? 0 : 2;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail asymptotics of discounted aggregate losses", "tailrisk"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON model configuration")->required();
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--workers", f.workers, "Worker threads");
    sub->add_option("--budget", f.budget, "Monte Carlo sample count");
    sub->add_option("--x", f.x, "Threshold");
    sub->add_option("--grid", f.grid, "Threshold grid lo:hi:points");
    sub->add_option("--method", f.method, "crude | conditional | asmussen-kroese");
    sub->add_option("--out", f.out, "Output file (default stdout)");
    sub->add_option("--which", f.which, "S or M");
    sub->add_option("--variant", f.variant, "i or ii");
    sub->add_option("--theorem", f.theorem, "theorem1 | theorem2 | weighted | corollary1 | corollary2");
    sub->add_option("--estimator", f.estimator, "oracle | conditional-mc");
    sub->add_option("--base", f.base, "oracle | conditional-mc | asymptote | automatic");
  };
  using Handler = int (*)(const Config&, const Flags&, std::ostream&);
  const std::pair<const char*, Handler> commands[] = {
      {"simulate", cmd_simulate}, {"tail", cmd_tail},         {"oracle", cmd_oracle},
      {"asympt", cmd_asympt},     {"constants", cmd_constants}, {"compare", cmd_compare},
  };
  const char* help[] = {"Export simulated paths as CSV", "Monte Carlo tail estimate",
                        "Exact tail by nested quadrature", "Asymptotic expansion as JSON",
                        "Constant tables as CSV", "Ratio table against an expansion"};
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < std::size(commands); ++k) {
    subs.push_back(app.add_subcommand(commands[k].first, help[k]));
    common(subs.back());
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  try {
    const Config cfg = load(f);
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k]->parsed()) return commands[k].second(cfg, f, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "precondition failed [" << e.hypothesis() << "]: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace tailrisk::cli
