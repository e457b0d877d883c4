#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace caplab::cli {
namespace {

json check_json(const capillary::Check& c) {
  json j{{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

bool has_directions(const sigma::SigmaGrid& g) {
  return std::any_of(g.singular.begin(), g.singular.end(), [](char s) { return !s; });
}

}  // namespace

std::string artifact_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
      out += c;
    else if (c == '/')
      out += "__";
    else
      out += '_';
  }
  return out;
}

void write_field_svg(const sigma::SigmaGrid& g, const std::vector<sigma::Singularity>& singularities,
                     const std::string& title, const std::string& path) {
  const double size = 600.0, margin = 30.0, plot = size - 2 * margin;
  const double u0 = g.us.front(), u1 = g.us.back(), v0 = g.vs.front(), v1 = g.vs.back();
  const double sx = plot / (u1 - u0), sy = plot / (v1 - v0);
  auto X = [&](double u) { return margin + (u - u0) * sx; };
  auto Y = [&](double v) { return size - margin - (v - v0) * sy; };
  const int stride = std::max(1, std::max(g.nu(), g.nv()) / 24);
  const double half = 0.4 * plot * stride / std::max(g.nu() - 1, g.nv() - 1);

  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                size, size + 20, size, size + 20);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#999\"/>\n", margin,
                margin, plot, plot);
  s += buf;
  s += "<text x=\"" + std::to_string(int(margin)) + "\" y=\"20\" font-family=\"monospace\" font-size=\"13\">" + title +
       "</text>\n";
  auto segment = [&](double cx, double cy, double theta, const char* colour, double width) {
    // Parameter direction mapped through the plot scaling, then normalized.
    double dx = std::cos(theta) * sx, dy = -std::sin(theta) * sy;
    const double n = std::hypot(dx, dy);
    dx *= half / n, dy *= half / n;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"%.1f\"/>\n",
                  cx - dx, cy - dy, cx + dx, cy + dy, colour, width);
    s += buf;
  };
  for (int i = 0; i < g.nu(); i += stride)
    for (int j = 0; j < g.nv(); j += stride) {
      const int k = g.at(i, j);
      const double cx = X(g.us[i]), cy = Y(g.vs[j]);
      if (g.singular[k]) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" fill=\"#888\"/>\n", cx, cy);
        s += buf;
        continue;
      }
      segment(cx, cy, g.theta1[k], "#1f4e9c", 1.2);
      segment(cx, cy, g.theta2[k], "#c0392b", 0.8);
    }
  for (const auto& p : singularities) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"7\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\">2i=%d</text>\n",
                  X(p.u), Y(p.v), X(p.u) + 9, Y(p.v) - 9, p.twice_index);
    s += buf;
  }
  s += "</svg>\n";
  write_text(path, s);
}

RunOutput run_config(const Config& cfg, int jobs, const std::filesystem::path& out_dir) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t n = cfg.jobs.size();
  std::vector<std::vector<Entry>> results(n);
  std::vector<double> seconds(n, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      const auto t0 = clock::now();
      try {
        results[k] = cfg.jobs[k].run();
      } catch (const std::exception& e) {
        Entry err;
        err.name = cfg.jobs[k].name;
        err.expect = "pass";
        err.result.scenario = cfg.jobs[k].type;
        err.error = e.what();
        results[k] = {err};
      }
      seconds[k] = std::chrono::duration<double>(clock::now() - t0).count();
    }
  };
  const int workers = std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(out_dir);
  RunOutput out;
  out.all_ok = true;
  json scenarios = json::array();
  json failed = json::array();
  for (std::size_t k = 0; k < n; ++k)
    for (auto& e : results[k]) {
      const auto& r = e.result;
      json j;
      j["name"] = e.name;
      j["type"] = cfg.jobs[k].type;
      j["expect"] = e.expect;
      j["verdict"] = e.verdict();
      j["ok"] = e.ok();
      j["conclusion"] = e.error.empty() ? r.conclusion : "error: " + e.error;
      json params = json::object();
      for (const auto& [key, v] : r.params) params[key] = v;
      j["params"] = params;
      json labels = json::object();
      for (const auto& [key, v] : r.labels) labels[key] = v;
      j["labels"] = labels;
      json checks = json::array();
      for (const auto& c : r.checks) checks.push_back(check_json(c));
      j["checks"] = checks;
      json artifacts = json::object();
      if (r.grid) {
        const std::string stem = artifact_stem(e.name);
        if (cfg.csv) {
          sigma::write_sigma_csv(*r.grid, (out_dir / (stem + ".csv")).string());
          artifacts["csv"] = stem + ".csv";
        }
        if (cfg.svg && has_directions(*r.grid)) {
          write_field_svg(*r.grid, e.singularities, e.name, (out_dir / (stem + ".svg")).string());
          artifacts["svg"] = stem + ".svg";
        }
      }
      j["artifacts"] = artifacts;
      for (auto it = e.extra.begin(); it != e.extra.end(); ++it) j[it.key()] = it.value();
      scenarios.push_back(std::move(j));
      if (!e.ok()) {
        out.all_ok = false;
        failed.push_back(e.name);
      }
      out.entries.push_back(std::move(e));
    }

  out.report["tool"] = "caplab";
  out.report["config"] = std::filesystem::path(cfg.source).filename().string();
  out.report["config_hash"] = cfg.hash;
  out.report["seed"] = cfg.seed;
  out.report["scenarios"] = std::move(scenarios);
  out.report["summary"] = {{"entries", out.entries.size()},
                           {"ok", out.entries.size() - failed.size()},
                           {"failed", failed},
                           {"all_ok", out.all_ok}};

  json timing = json::array();
  for (std::size_t k = 0; k < n; ++k) timing.push_back({{"name", cfg.jobs[k].name}, {"seconds", seconds[k]}});
  out.timing = {{"config_hash", cfg.hash},
                {"jobs", workers},
                {"total_seconds", std::chrono::duration<double>(clock::now() - start).count()},
                {"scenarios", timing}};
  write_text(out_dir / "report.json", out.report.dump(2) + "\n");
  write_text(out_dir / "timing.json", out.timing.dump(2) + "\n");
  return out;
}

}  // namespace caplab::cli
