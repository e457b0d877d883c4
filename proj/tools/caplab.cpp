#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "report.hpp"
#include "scenarios.hpp"

namespace {

using namespace caplab;
using namespace caplab::cli;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CAPLAB_OUT"); env && *env) return env;
  return "caplab_out";
}

int cmd_run(const std::string& config, int jobs, const std::string& out, std::optional<std::uint64_t> seed) {
  const Config cfg = load_config(config, seed);
  const auto dir = output_dir(out);
  const RunOutput res = run_config(cfg, jobs, dir);
  for (const auto& e : res.entries) {
    std::printf("%-4s %-44s verdict=%-10s expect=%s", e.ok() ? "ok" : "FAIL", e.name.c_str(), e.verdict().c_str(),
                e.expect.c_str());
    if (!e.error.empty()) std::printf("  (%s)", e.error.c_str());
    std::printf("\n");
  }
  std::printf("%zu/%zu as expected; report: %s\n", res.report["summary"]["ok"].get<std::size_t>(),
              res.entries.size(), (dir / "report.json").string().c_str());
  return res.all_ok ? 0 : kExitFail;
}

struct Circle {
  double cx = 0, cy = 0, r = 0;
  int n = 0;
};

Circle parse_circle(const std::string& spec) {
  Circle c;
  std::istringstream in(spec);
  std::string tok;
  double v[4];
  int k = 0;
  while (std::getline(in, tok, ',')) {
    if (k == 4) throw ConfigError("--circle expects cx,cy,r,n");
    try {
      std::size_t used = 0;
      v[k] = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("--circle: '" + tok + "' is not a number");
    }
    ++k;
  }
  if (k != 4) throw ConfigError("--circle expects cx,cy,r,n");
  c.cx = v[0], c.cy = v[1], c.r = v[2], c.n = static_cast<int>(v[3]);
  if (!(c.r > 0.0)) throw ConfigError("--circle: radius must be > 0");
  if (c.n < 16 || double(c.n) != v[3]) throw ConfigError("--circle: n must be an integer >= 16");
  return c;
}

int cmd_trace(const std::string& config, const std::string& selector, const std::string& circle,
              const std::string& csv_path) {
  const Config cfg = config.empty() ? Config{} : load_config(config);
  std::optional<surfaces::ParamRect> rect;
  const auto field = resolve_field(cfg, selector, &rect);
  const Circle c = parse_circle(circle);
  if (rect && (c.cx - c.r < rect->u0 || c.cx + c.r > rect->u1 || c.cy - c.r < rect->v0 || c.cy + c.r > rect->v1))
    throw index::IndexError("curve exits the field domain [" + std::to_string(rect->u0) + ", " +
                            std::to_string(rect->u1) + "] x [" + std::to_string(rect->v0) + ", " +
                            std::to_string(rect->v1) + "]");
  const auto trace = index::trace_circle(field, c.cx, c.cy, c.r, c.n);
  const auto lifted = index::unwrap_doubled(trace);
  const double total = 2.0 * index::angular_variation(trace);

  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw std::runtime_error("cannot write '" + csv_path + "'");
  }
  std::ostream& out = csv_path.empty() ? std::cout : file;
  out << "t,theta,theta2_unwrapped\n";
  char buf[96];
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g\n", trace.t[k], trace.theta[k], lifted[k]);
    out << buf;
  }
  std::fprintf(stderr, "samples=%zu doubled_angle_change=%.12g index=%.6g\n", trace.t.size(), total,
               total / (4.0 * M_PI));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"caplab: capillary surface numerical laboratory"};
  app.require_subcommand(1);

  std::string config, out, selector, circle, csv;
  int jobs = 1;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run every scenario of a config and write the report");
  run->add_option("config", config, "scenario config (TOML)")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out, "output directory (overrides CAPLAB_OUT)");
  run->add_option("--seed", seed, "override the config seed");

  auto* presets = app.add_subcommand("presets", "print the preset catalog as JSON");

  auto* trace = app.add_subcommand("trace", "sample a line field along a circle");
  trace->add_option("config", config, "scenario config (needed for <scenario>.L1/.L2 selectors)")
      ->check(CLI::ExistingFile);
  trace->add_option("--field", selector, "model(n[,minus]), constant(theta) or <scenario>.L1/.L2")->required();
  trace->add_option("--circle", circle, "cx,cy,r,n")->required();
  trace->add_option("--csv", csv, "write the trace here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, jobs, out, seed);
    if (*presets) {
      std::cout << presets_catalog().dump(2) << "\n";
      return 0;
    }
    if (*trace) return cmd_trace(config, selector, circle, csv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "caplab: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const index::IndexError& e) {
    std::fprintf(stderr, "caplab: trace error: %s\n", e.what());
    return kExitFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "caplab: %s\n", e.what());
    return kExitFail;
  }
  return 0;
}
