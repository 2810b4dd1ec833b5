#pragma once

#include "tailrisk/asymptotics.hpp"
#include "tailrisk/diagnostics.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tailrisk::cli {

enum class Theorem { theorem1, theorem2, weighted, corollary1, corollary2 };

Theorem parse_theorem(std::string_view name);
std::string_view theorem_name(Theorem t) noexcept;

struct RunSettings {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t budget = 100000;
  std::optional<double> x;
  std::vector<double> grid;
  std::string grid_text;
  TailMethod method = TailMethod::asmussen_kroese;
  Which which = Which::S;
  Variant variant = Variant::dependent_i;
  std::optional<Theorem> theorem;
  TailSource estimator = TailSource::monte_carlo;
  BaseMethod base = BaseMethod::automatic;
  double tolerance = 0.1;
  std::optional<double> theta;
  bool product = false;  // oracle target: product of the y_laws
};

struct Config {
  ModelSpec spec;
  RunSettings run;
  nlohmann::json resolved;  // the config as interpreted, flags applied

  MonteCarlo mc() const { return {run.budget, run.seed, run.workers}; }
  bool iid() const;
};

TailLaw parse_law(const nlohmann::json& j, const std::string& path);
nlohmann::json law_to_json(const TailLaw& law);

// Parses a document with sections model, x_laws[], y_laws[], weights[] and
// run. A single-entry law list is replicated to the horizon n.
Config parse_config(const nlohmann::json& doc);

// Re-resolves after flag overrides so `resolved` stays authoritative.
void refresh_resolved(Config& cfg);

}  // namespace tailrisk::cli
