#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "caplab/capillary.hpp"
#include "caplab/index.hpp"
#include "caplab/sigma.hpp"

namespace caplab::cli {

using json = nlohmann::ordered_json;

/// Validation failure; the message names the source line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One row of the report.
struct Entry {
  std::string name;
  std::string expect;  // filled from the scenario when a runner leaves it empty
  capillary::ScenarioResult result;
  std::string error;  // non-empty when the scenario threw
  json extra = json::object();
  std::vector<sigma::Singularity> singularities;

  std::string verdict() const { return error.empty() ? capillary::to_string(result.verdict) : "error"; }
  bool ok() const { return error.empty() && verdict() == expect; }
};

struct Job {
  std::string name;
  std::string type;
  int line = 0;
  std::function<std::vector<Entry>()> run;
};

/// Surface with its comparison family, addressable by trace selectors.
struct FieldSource {
  geometry::ConformalChart chart;
  geometry::ParametricSurface param;
  families::FamilyKind family;
  surfaces::ParamRect rect;
};

struct Config {
  std::string source;
  std::string hash;  // FNV-1a of the config bytes
  std::uint64_t seed = 42;
  bool csv = true;
  bool svg = true;
  std::vector<Job> jobs;
  std::map<std::string, FieldSource> fields;
};

std::string fnv1a_hex(const std::string& bytes);

Config load_config_text(const std::string& text, const std::string& source,
                        std::optional<std::uint64_t> seed_override = std::nullopt);
Config load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Surface, domain, family and scenario presets with parameter ranges.
json presets_catalog();

/// "model(n)", "model(n,minus)", "constant(theta)" or "<scenario>.L1" / "<scenario>.L2"
/// for sigma_field scenarios. `domain` receives the parameter rectangle when
/// the field lives on a surface patch.
index::DirectionField resolve_field(const Config& cfg, const std::string& selector,
                                    std::optional<surfaces::ParamRect>* domain = nullptr);

}  // namespace caplab::cli
