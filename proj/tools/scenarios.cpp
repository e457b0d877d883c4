#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "caplab/ovaloid.hpp"
#include "toml_lite.hpp"

namespace caplab::cli {
namespace {

using capillary::check_above;
using capillary::check_below;
using capillary::ScenarioResult;
using capillary::Verdict;
using families::FamilyKind;
using geometry::ConformalChart;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Parameter declarations

enum class Kind { number, integer, string, boolean, numbers, integers, rows };

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::number: return "number";
    case Kind::integer: return "integer";
    case Kind::string: return "string";
    case Kind::boolean: return "boolean";
    case Kind::numbers: return "array of numbers";
    case Kind::integers: return "array of integers";
    default: return "array of rows";
  }
}

struct Param {
  std::string key;
  Kind kind = Kind::number;
  json def;  // null: optional without default
  double lo = -kInf, hi = kInf;
  bool lo_open = false, hi_open = false;
  std::vector<std::string> choices;
  int length = 0;  // required array (or row) length, 0 for any
  std::string doc;

  bool bounded() const { return std::isfinite(lo) || std::isfinite(hi); }

  std::string range_text() const {
    if (std::isfinite(lo) && std::isfinite(hi))
      return std::string(lo_open ? "in (" : "in [") + fmt(lo) + ", " + fmt(hi) + (hi_open ? ")" : "]");
    if (std::isfinite(lo)) return std::string(lo_open ? "> " : ">= ") + fmt(lo);
    return std::string(hi_open ? "< " : "<= ") + fmt(hi);
  }

  bool in_range(double x) const {
    if (!std::isfinite(x)) return false;
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    return hi_open ? x < hi : x <= hi;
  }

  json describe() const {
    json j;
    j["key"] = key;
    j["kind"] = kind_name(kind);
    j["default"] = def;
    if (bounded()) {
      json r;
      if (std::isfinite(lo)) r["min"] = lo, r["min_exclusive"] = lo_open;
      if (std::isfinite(hi)) r["max"] = hi, r["max_exclusive"] = hi_open;
      j["range"] = r;
    }
    if (!choices.empty()) j["choices"] = choices;
    if (length > 0) j["length"] = length;
    j["doc"] = doc;
    return j;
  }
};

Param number(std::string key, json def, double lo, double hi, bool lo_open, bool hi_open, std::string doc) {
  Param p;
  p.key = std::move(key);
  p.def = std::move(def);
  p.lo = lo, p.hi = hi, p.lo_open = lo_open, p.hi_open = hi_open;
  p.doc = std::move(doc);
  return p;
}

Param any_number(std::string key, json def, std::string doc) {
  return number(std::move(key), std::move(def), -kInf, kInf, false, false, std::move(doc));
}

Param positive(std::string key, double def, std::string doc) {
  return number(std::move(key), def, 0.0, kInf, true, false, std::move(doc));
}

Param integer(std::string key, int def, double lo, double hi, std::string doc) {
  Param p = number(std::move(key), def, lo, hi, false, false, std::move(doc));
  p.kind = Kind::integer;
  return p;
}

Param resolution(std::string key, int def, std::string doc) { return integer(std::move(key), def, 16, kInf, std::move(doc)); }

Param choice(std::string key, std::string def, std::vector<std::string> choices, std::string doc) {
  Param p;
  p.key = std::move(key);
  p.kind = Kind::string;
  p.def = std::move(def);
  p.choices = std::move(choices);
  p.doc = std::move(doc);
  return p;
}

Param text(std::string key, std::string def, std::string doc) { return choice(std::move(key), std::move(def), {}, std::move(doc)); }

Param flag(std::string key, bool def, std::string doc) {
  Param p;
  p.key = std::move(key);
  p.kind = Kind::boolean;
  p.def = def;
  p.doc = std::move(doc);
  return p;
}

Param numbers(std::string key, json def, double lo, double hi, bool lo_open, bool hi_open, int length, std::string doc) {
  Param p = number(std::move(key), std::move(def), lo, hi, lo_open, hi_open, std::move(doc));
  p.kind = Kind::numbers;
  p.length = length;
  return p;
}

Param integers(std::string key, json def, double lo, double hi, std::string doc) {
  Param p = number(std::move(key), std::move(def), lo, hi, false, false, std::move(doc));
  p.kind = Kind::integers;
  return p;
}

Param rows(std::string key, json def, int length, std::string doc) {
  Param p = any_number(std::move(key), std::move(def), std::move(doc));
  p.kind = Kind::rows;
  p.length = length;
  return p;
}

/// Validated parameter values keyed by name.
class Params {
 public:
  json values = json::object();

  bool has(const std::string& k) const { return values.contains(k) && !values.at(k).is_null(); }
  double num(const std::string& k) const { return values.at(k).get<double>(); }
  int integer(const std::string& k) const { return values.at(k).get<int>(); }
  std::string str(const std::string& k) const { return values.at(k).get<std::string>(); }
  bool flag(const std::string& k) const { return values.at(k).get<bool>(); }
  std::vector<double> nums(const std::string& k) const { return values.at(k).get<std::vector<double>>(); }
  std::vector<int> ints(const std::string& k) const { return values.at(k).get<std::vector<int>>(); }
  std::vector<std::vector<double>> table(const std::string& k) const {
    return values.at(k).get<std::vector<std::vector<double>>>();
  }
};

using Complain = std::function<void(const std::string& key, const std::string& what)>;

// ---------------------------------------------------------------------------
// Surface presets

struct SurfacePreset {
  std::string name;
  std::string doc;
  std::string family;
  std::vector<Param> params;
  std::function<FieldSource(const Params&)> build;
};

FieldSource from_patch(const surfaces::SurfacePatch& patch, ConformalChart chart, FamilyKind family) {
  return FieldSource{chart, patch.param, std::move(family), patch.rect};
}

const std::vector<SurfacePreset>& surface_presets() {
  static const std::vector<SurfacePreset> presets = [] {
    std::vector<SurfacePreset> s;
    s.push_back({"plane", "horizontal plane through the origin", "planes",
                 {positive("half_width", 0.5, "half side of the parameter square")}, [](const Params& p) {
                   return from_patch(surfaces::plane_patch(Vec3::Zero(), Vec3::UnitZ(), p.num("half_width")),
                                     ConformalChart::euclidean(), FamilyKind::planes());
                 }});
    s.push_back({"sphere_cap", "cap in the unit ball meeting the boundary at angle alpha", "cmc_spheres",
                 {number("H", 1.5, -3.5, 3.5, false, false, "mean curvature"),
                  number("alpha", M_PI / 3, 0.0, M_PI, true, true, "contact angle")},
                 [](const Params& p) {
                   const auto cap = capillary::nitsche_cap(p.num("H"), p.num("alpha"));
                   return from_patch(cap.patch, ConformalChart::euclidean(), FamilyKind::cmc_spheres(p.num("H")));
                 }});
    s.push_back({"catenoid", "catenoid about the x3-axis, cut where it leaves the unit ball", "planes",
                 {number("neck", 0.460485088250134, 0.0, 1.0, true, true, "neck radius")},
                 [](const Params& p) {
                   const double a = p.num("neck");
                   const double t = capillary::catenoid_exit_parameter(a);
                   return from_patch(surfaces::catenoid_patch(Vec3::Zero(), Vec3::UnitZ(), a, -t, t),
                                     ConformalChart::euclidean(), FamilyKind::planes());
                 }});
    s.push_back({"graph_saddle", "graph of (u^2 - v^2)/2", "planes",
                 {positive("half_width", 0.5, "half side of the parameter square")}, [](const Params& p) {
                   return from_patch(surfaces::graph_patch({}, surfaces::saddle_height(), p.num("half_width")),
                                     ConformalChart::euclidean(), FamilyKind::planes());
                 }});
    s.push_back({"graph_monkey", "graph of Re(alpha z^n)", "planes",
                 {integer("n", 3, 2, 8, "degree"),
                  numbers("alpha", json::array({1.0, 0.0}), -kInf, kInf, false, false, 2, "[re, im], nonzero"),
                  positive("half_width", 0.5, "half side of the parameter square")},
                 [](const Params& p) {
                   const auto a = p.nums("alpha");
                   return from_patch(surfaces::graph_patch({}, surfaces::harmonic_height(p.integer("n"), {a[0], a[1]}),
                                                           p.num("half_width")),
                                     ConformalChart::euclidean(), FamilyKind::planes());
                 }});
    s.push_back({"equator", "great sphere of S^3 with the given pole, stereographic chart", "equators_s3",
                 {numbers("pole", json::array({0.3, 0.2, 0.5, 0.8}), -kInf, kInf, false, false, 4, "pole in R^4"),
                  number("theta_max", 2.5, 0.0, M_PI, true, true, "polar extent of the patch")},
                 [](const Params& p) {
                   const auto a = p.nums("pole");
                   const Vec4 pole = Vec4(a[0], a[1], a[2], a[3]).normalized();
                   return from_patch(surfaces::equator_patch(pole, p.num("theta_max")), ConformalChart::sphere3(),
                                     FamilyKind::equators_s3());
                 }});
    return s;
  }();
  return presets;
}

const SurfacePreset* find_surface(const std::string& name) {
  for (const auto& s : surface_presets())
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Scenario types

struct Ctx {
  std::uint64_t seed = 42;
};

struct ScenarioType {
  std::string type;
  std::string doc;
  std::vector<Param> params;
  std::function<std::vector<Entry>(const Params&, const std::string& name, const Ctx&)> run;
  std::function<void(const Params&, const Complain&)> validate;
};

Entry entry(std::string name, ScenarioResult r, std::string expect = {}) {
  Entry e;
  e.name = std::move(name);
  e.result = std::move(r);
  e.expect = std::move(expect);
  return e;
}

std::vector<Param> nitsche_tolerances() {
  return {resolution("grid", 32, "sigma grid nodes per side"),
          integer("boundary_samples", 16, 4, kInf, "rim points for angle and residual checks"),
          positive("tol_sigma", 1e-8, "max ||sigma|| / max(1, |H|)"),
          positive("tol_residual", 1e-8, "boundary equation residual"),
          positive("tol_spread", 1e-9, "contact angle spread")};
}

capillary::NitscheOptions nitsche_options(const Params& p) {
  capillary::NitscheOptions o;
  o.grid = p.integer("grid");
  o.boundary_samples = p.integer("boundary_samples");
  o.tol_sigma = p.num("tol_sigma");
  o.tol_residual = p.num("tol_residual");
  o.tol_spread = p.num("tol_spread");
  return o;
}

double failing_margin(const ScenarioResult& r) {
  double m = 0.0;
  for (const auto& c : r.checks)
    if (!c.pass && std::isfinite(c.value)) m = std::max(m, c.value);
  return m;
}

std::vector<Entry> run_nitsche(const Params& p, const std::string& name, const Ctx&) {
  auto o = nitsche_options(p);
  o.bump = p.num("bump");
  if (p.has("alpha_claimed")) o.alpha_claimed = p.num("alpha_claimed");
  return {entry(name, capillary::nitsche_scenario(p.num("H"), p.num("alpha"), o))};
}

std::vector<Entry> run_nitsche_suite(const Params& p, const std::string& name, const Ctx&) {
  const auto o = nitsche_options(p);
  std::vector<Entry> out;
  for (double H : p.nums("H"))
    for (double a : p.nums("alpha")) {
      auto r = capillary::nitsche_scenario(H, a, o);
      // Inadmissible pairs are listed but not part of the claim.
      const std::string expect = r.verdict == Verdict::degenerate ? "degenerate" : "pass";
      out.push_back(entry(name + "/H=" + fmt(H) + ",alpha=" + fmt(a), std::move(r), expect));
    }
  if (p.flag("controls")) {
    auto bump = o;
    bump.bump = 1e-3;
    auto wrong = o;
    wrong.alpha_claimed = M_PI / 3 + 0.1;
    const std::pair<std::string, ScenarioResult> controls[] = {
        {"control/bumped_cap", capillary::nitsche_scenario(1.5, M_PI / 3, bump)},
        {"control/wrong_alpha", capillary::nitsche_scenario(1.5, M_PI / 3, wrong)},
        {"control/bumped_disk", capillary::nitsche_scenario(0.0, M_PI / 2, bump)},
    };
    for (const auto& [label, r] : controls) {
      Entry e = entry(name + "/" + label, r, "fail");
      e.extra["failing_margin"] = failing_margin(r);
      e.result.grid.reset();
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<Entry> run_model_index(const Params& p, const std::string& name, const Ctx& ctx) {
  const double radius = p.num("radius");
  const int samples = p.integer("samples");
  const auto branch = p.str("branch") == "minus" ? index::Branch::minus : index::Branch::plus;
  ScenarioResult r;
  r.scenario = "model_index";
  r.params = {{"radius", radius}, {"samples", samples}};
  r.labels = {{"branch", p.str("branch")}};
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> angle(-2.0 * M_PI, 2.0 * M_PI);
  json table = json::array();
  for (int n : p.ints("n")) {
    const auto ir = index::index(index::model_field(n, branch), 0.0, 0.0, radius, samples);
    const int expected = -(n - 2);
    const std::string tag = "n=" + std::to_string(n) + " ";
    r.checks.push_back(check_below(tag + "twice_index_error", std::abs(ir.index.twice_index - expected), 0.0));
    r.checks.push_back(check_below(tag + "rounding_residual", ir.residual, p.num("tol_residual")));
    r.checks.push_back(
        check_below(tag + "variation_error", std::abs(ir.variation + (n - 2) * M_PI), p.num("tol_variation")));
    double quad = 0.0;
    for (int k = 0; k < p.integer("intervals"); ++k) {
      double t0 = angle(rng), t1 = angle(rng);
      if (t1 < t0) std::swap(t0, t1);
      const auto v = index::model_angular_variation(n, t0, t1, branch);
      quad = std::max(quad, std::abs(v.quadrature - (-(n - 2) * (t1 - t0) / 2.0)));
    }
    if (p.integer("intervals") > 0) r.checks.push_back(check_below(tag + "quadrature_error", quad, p.num("tol_quadrature")));
    table.push_back({{"n", n},
                     {"twice_index", ir.index.twice_index},
                     {"index", ir.index.value()},
                     {"expected_index", 0.5 * expected},
                     {"residual", ir.residual},
                     {"variation", ir.variation}});
  }
  r.settle("index -(n-2)/2 reproduced", "index mismatch");
  Entry e = entry(name, std::move(r));
  e.extra["table"] = std::move(table);
  return {e};
}

std::vector<Entry> run_annulus(const Params& p, const std::string& name, const Ctx&) {
  capillary::AnnulusOptions o;
  const std::string input = p.str("input");
  o.input = input == "squeezed_catenoid" ? capillary::AnnulusInput::squeezed_catenoid
            : input == "sphere_cap"      ? capillary::AnnulusInput::sphere_cap
                                         : capillary::AnnulusInput::critical_catenoid;
  o.squeeze = p.num("squeeze");
  o.grid = p.integer("grid");
  o.tol_angle = p.num("tol_angle");
  Entry e = entry(name, capillary::annulus_scenario(o));
  if (e.result.grid) e.singularities = sigma::sigma_singularities(*e.result.grid).points;
  return {e};
}

capillary::FreeBoundaryOptions free_boundary_options(const Params& p) {
  capillary::FreeBoundaryOptions o;
  o.neck = p.num("neck");
  o.twist = p.num("twist");
  o.boundary_samples = p.integer("boundary_samples");
  o.extent = p.num("extent");
  o.tol_mixed = p.num("tol_mixed");
  o.tol_angle = p.num("tol_angle");
  o.tol_seam = p.num("tol_seam");
  o.swap_branches = p.flag("swap_branches");
  return o;
}

std::vector<Entry> run_free_boundary(const Params& p, const std::string& name, const Ctx&) {
  return {entry(name, capillary::free_boundary_catenoid_scenario(free_boundary_options(p)))};
}

std::vector<Entry> run_weingarten(const Params& p, const std::string& name, const Ctx& ctx) {
  capillary::WeingartenOptions o;
  o.relation = p.str("relation");
  o.constant = p.num("constant");
  o.samples = p.integer("samples");
  o.members = p.integer("members");
  o.seed = ctx.seed;
  o.tol_relation = p.num("tol_relation");
  o.tol_spread = p.num("tol_spread");
  return {entry(name, capillary::weingarten_family_check(families::Ovaloid::from_spec(p.str("profile")), o))};
}

std::vector<Entry> run_s3_scan(const Params& p, const std::string& name, const Ctx& ctx) {
  std::vector<int> seeds = p.ints("seeds");
  if (seeds.empty()) seeds.push_back(static_cast<int>(ctx.seed));
  std::vector<Entry> out;
  for (int s : seeds) {
    auto r = capillary::s3_scan_scenario(p.num("r"), p.integer("samples"), static_cast<unsigned long long>(s),
                                         p.num("tol_spread"));
    out.push_back(entry(seeds.size() > 1 ? name + "/seed=" + std::to_string(s) : name, std::move(r)));
  }
  return out;
}

surfaces::HeightFunction sum(const surfaces::HeightFunction& a, const surfaces::HeightFunction& b) {
  return {[a, b](double u, double v) { return a.value(u, v) + b.value(u, v); },
          [a, b](double u, double v) { return Vec2(a.gradient(u, v) + b.gradient(u, v)); },
          [a, b](double u, double v) { return Mat2(a.hessian(u, v) + b.hessian(u, v)); }};
}

std::vector<Entry> run_bers_jet(const Params& p, const std::string& name, const Ctx&) {
  const int n = p.integer("n");
  const auto a = p.nums("alpha");
  const std::complex<double> alpha(a[0], a[1]);
  const auto h = sum(surfaces::harmonic_height(n, alpha),
                     surfaces::harmonic_height(n + 2, {p.num("perturbation"), 0.0}));
  ScenarioResult r;
  r.scenario = "bers_jet";
  r.params = {{"n", n}, {"alpha_re", a[0]}, {"alpha_im", a[1]}, {"perturbation", p.num("perturbation")}};
  sigma::JetOptions jo;
  jo.rho0 = p.num("rho0");
  const auto jet = sigma::leading_harmonic_jet(h.value, jo);
  r.labels = {{"jet_status", sigma::to_string(jet.status)}};
  r.params.emplace_back("recovered_n", jet.n);
  r.params.emplace_back("recovered_alpha_re", jet.alpha.real());
  r.params.emplace_back("recovered_alpha_im", jet.alpha.imag());
  r.checks.push_back(check_below("order_error", std::abs(jet.n - n), 0.0));
  r.checks.push_back(check_below("alpha_rel_error", std::abs(jet.alpha - alpha) / std::abs(alpha), p.num("tol_alpha")));

  const auto patch = surfaces::graph_patch({}, h, 0.5);
  const auto chart = ConformalChart::euclidean();
  const auto planes = FamilyKind::planes();
  auto fn = [&](double u, double v) { return sigma::sigma_at(chart, patch.param, planes, u, v); };
  const auto mc = sigma::sigma_model_consistency(fn, jet, 1.0, p.nums("radii"));
  r.checks.push_back(check_above("consistency_decreasing", mc.decreasing() ? 1.0 : 0.0, 1.0));
  r.checks.push_back(check_below("consistency_last_ratio", mc.last_ratio(), 1.0));
  r.settle("leading term recovered and consistent with sigma", "jet or model mismatch");
  Entry e = entry(name, std::move(r));
  e.extra["radii"] = mc.radii;
  e.extra["residuals"] = mc.residuals;
  return {e};
}

std::vector<Entry> run_poincare_hopf(const Params& p, const std::string& name, const Ctx&) {
  const std::string field = p.str("field");
  std::vector<index::IndexedSingularity> sing;
  int chi = 2;
  if (field == "quadratic") {
    index::QuadraticDifferential q;
    for (const auto& row : p.table("factors")) q.factors.push_back({{row[0], row[1]}, static_cast<int>(row[2])});
    sing = index::sphere_field_indices(q, p.integer("samples"));
  } else if (field == "all_negative") {
    const int n = p.integer("n");
    for (int k = 0; k < p.integer("count"); ++k) {
      const double cu = 2.0 * k;
      const auto model = index::model_field(n);
      index::DirectionField f = [model, cu](double u, double v) { return model(u - cu, v); };
      const auto ir = index::index(f, cu, 0.0, 0.5, p.integer("samples"));
      sing.push_back({cu, 0.0, 0.5, ir.index, "model n=" + std::to_string(n)});
    }
  } else {
    chi = 0;
    capillary::AnnulusOptions o;
    o.grid = p.integer("grid");
    const auto a = capillary::annulus_scenario(o);
    if (!a.grid) throw std::runtime_error("annulus scenario produced no grid");
    const double cell = (a.grid->us.back() - a.grid->us.front()) / (a.grid->nu() - 1);
    for (const auto& s : sigma::sigma_singularities(*a.grid).points)
      sing.push_back({s.u, s.v, cell, {s.twice_index}, "umbilic"});
  }
  const auto rep = index::poincare_hopf_audit(sing, chi);
  ScenarioResult r;
  r.scenario = "poincare_hopf";
  r.labels = {{"field", field}};
  r.params = {{"euler_characteristic", chi}, {"index_sum", rep.sum()}, {"singularities", double(sing.size())}};
  r.checks.push_back(check_below("twice_index_gap", std::abs(rep.twice_sum - 2 * chi), 0.0));
  r.settle(index::verdict(rep), index::verdict(rep));
  Entry e = entry(name, std::move(r));
  json table = json::array();
  for (const auto& s : sing)
    table.push_back({{"u", s.u}, {"v", s.v}, {"radius", s.radius}, {"twice_index", s.index.twice_index}, {"label", s.label}});
  e.extra["table"] = std::move(table);
  return {e};
}

std::vector<Entry> run_seam(const Params& p, const std::string& name, const Ctx&) {
  const double tol = p.num("tol_seam");
  const bool swap = p.flag("swap_branches");
  if (p.str("source") == "catenoid") {
    capillary::FreeBoundaryOptions o;
    o.tol_seam = tol;
    o.swap_branches = swap;
    auto full = capillary::free_boundary_catenoid_scenario(o);
    ScenarioResult r;
    r.scenario = "seam";
    r.labels = {{"source", "catenoid"}};
    for (const auto& c : full.checks)
      if (c.name.rfind("seam_", 0) == 0) r.checks.push_back(c);
    if (r.checks.empty()) throw std::runtime_error("catenoid scenario reported no seam checks");
    r.settle("doubled field regular across the seam", "capillary alignment violated");
    return {entry(name, std::move(r))};
  }
  const double a = p.num("angle");
  index::CollarField f;
  f.L1 = [a](double, double) { return a; };
  f.L2 = swap ? f.L1 : index::DirectionField([a](double, double) { return -a; });
  std::vector<double> ts;
  for (int k = 0; k < p.integer("samples"); ++k) ts.push_back(2.0 * M_PI * k / p.integer("samples"));
  const auto rep = index::seam_check(f, ts, tol);
  ScenarioResult r;
  r.scenario = "seam";
  r.labels = {{"source", "constant"}};
  r.params = {{"angle", a}};
  r.checks.push_back(check_below("seam_c0_gap", rep.c0_gap, tol));
  r.checks.push_back(check_below("seam_derivative_gap", rep.derivative_gap, tol));
  r.settle("doubled field regular across the seam", "capillary alignment violated");
  return {entry(name, std::move(r))};
}

FamilyKind family_from(const std::string& kind, double H, const std::string& profile) {
  if (kind == "cmc_spheres") return FamilyKind::cmc_spheres(H);
  if (kind == "equators_s3") return FamilyKind::equators_s3();
  if (kind == "translated_ovaloid") return FamilyKind::translated_ovaloid(families::Ovaloid::from_spec(profile));
  return FamilyKind::planes();
}

std::vector<Entry> run_transitivity(const Params& p, const std::string& name, const Ctx& ctx) {
  const auto kind = family_from(p.str("family"), p.num("H"), p.str("profile"));
  const auto rep = families::transitivity_audit(kind, p.integer("samples"), ctx.seed);
  ScenarioResult r;
  r.scenario = "transitivity";
  r.labels = {{"family", kind.describe()}};
  r.params = {{"samples", rep.samples}, {"max_descriptor_gap", rep.max_descriptor_gap}};
  r.checks.push_back(check_above("passed", rep.passed, rep.samples));
  r.checks.push_back(check_below("max_value_at_p", rep.max_value_at_p, p.num("tol_value")));
  r.checks.push_back(check_below("max_normal_angle", rep.max_normal_angle, p.num("tol_angle")));
  r.settle("unique member through every pointed plane", "transitivity violated");
  Entry e = entry(name, std::move(r));
  if (!rep.failures.empty()) e.extra["failures"] = rep.failures;
  return {e};
}

std::vector<Entry> run_ellipticity(const Params& p, const std::string& name, const Ctx& ctx) {
  std::mt19937_64 rng(ctx.seed);
  const double w = p.num("jet_bound");
  std::uniform_real_distribution<double> u(-w, w), eta(0.0, M_PI);
  const std::string eq = p.str("equation");
  ScenarioResult r;
  r.scenario = "ellipticity";
  r.labels = {{"equation", eq}};
  families::EllipticityReport rep;
  if (eq == "weingarten") {
    std::vector<Vec3> s(p.integer("samples"));
    for (auto& x : s) x = Vec3(u(rng), u(rng), eta(rng));
    rep = families::pde_ellipticity_audit(families::WeingartenRelation::constant_mean(p.num("c")), s);
    r.checks.push_back(check_above("min_product", rep.min_product, 0.0, "dPhi/dx * dPhi/dy"));
  } else {
    std::vector<families::JetSample> jets(p.integer("samples"));
    for (auto& j : jets) j = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto ge = eq == "cmc_graph" ? families::GraphEquation::cmc_graph : families::GraphEquation::minimal_graph;
    rep = families::pde_ellipticity_audit(ge, p.num("H"), jets);
    r.checks.push_back(check_above("min_phi_r", rep.min_phi_r, 0.0));
    r.checks.push_back(check_above("min_discriminant", rep.min_discriminant, 0.0, "4 Phi_r Phi_t - Phi_s^2"));
  }
  r.params = {{"samples", rep.samples}};
  r.checks.push_back(check_below("failures", rep.failures, 0.0));
  r.settle("elliptic at every sample", "ellipticity violated");
  return {entry(name, std::move(r))};
}

FieldSource build_field(const Params& p) {
  const auto* preset = find_surface(p.str("surface"));
  FieldSource src = preset->build(p);
  const std::string fam = p.str("family");
  if (fam != "auto") src.family = family_from(fam, p.num("family_H"), "round_sphere");
  return src;
}

std::vector<Entry> run_sigma_field(const Params& p, const std::string& name, const Ctx&) {
  const FieldSource src = build_field(p);
  const int g = p.integer("grid");
  ScenarioResult r;
  r.scenario = "sigma_field";
  r.labels = {{"surface", p.str("surface")}, {"family", src.family.describe()},
              {"chart", geometry::to_string(src.chart.kind())}};
  r.grid = sigma::sample_sigma_grid(src.chart, src.param, src.family, src.rect, g, g, p.num("rel_tol"));
  const auto rep = sigma::sigma_singularities(*r.grid, p.integer("isolation_cells"));
  r.params = {{"max_norm", r.grid->max_norm}, {"tol_sing", r.grid->tol_sing}, {"singularities", double(rep.points.size())}};
  Entry e;
  if (rep.non_isolated) {
    r.verdict = Verdict::degenerate;
    r.conclusion = rep.message.empty() ? "non-isolated zero set" : rep.message;
  } else {
    r.checks.push_back(check_below("lorentz_violations", r.grid->lorentz_violations, 0.0));
    r.settle("lorentzian away from isolated singularities", "family/PDE mismatch");
  }
  e = entry(name, std::move(r));
  json table = json::array();
  for (const auto& s : rep.points)
    table.push_back({{"u", s.u}, {"v", s.v}, {"twice_index", s.twice_index}, {"n", s.n}, {"cells", s.cells}});
  e.extra["singularities"] = std::move(table);
  e.singularities = rep.points;
  return {e};
}

std::vector<std::string> surface_names() {
  std::vector<std::string> out;
  for (const auto& s : surface_presets()) out.push_back(s.name);
  return out;
}

const std::vector<ScenarioType>& scenario_types() {
  static const std::vector<ScenarioType> types = [] {
    const std::string tol = "tolerance";
    std::vector<ScenarioType> t;
    {
      auto ps = nitsche_tolerances();
      ps.insert(ps.begin(), {number("H", 1.0, -3.5, 3.5, false, false, "mean curvature of the cap"),
                             number("alpha", M_PI / 2, 0.0, M_PI, true, true, "contact angle"),
                             number("alpha_claimed", nullptr, 0.0, M_PI, true, true,
                                    "angle fed to the boundary equation (default: alpha)"),
                             number("bump", 0.0, -0.05, 0.05, false, false, "radial perturbation amplitude")});
      t.push_back({"nitsche", "spherical cap or disk in the unit ball against cmc_spheres(H)", ps, run_nitsche, {}});
    }
    {
      auto ps = nitsche_tolerances();
      ps.insert(ps.begin(),
                {numbers("H", json::array({0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 3.0, -3.0}), -3.5, 3.5, false, false, 0,
                         "mean curvatures"),
                 numbers("alpha", json::array({M_PI / 6, M_PI / 3, M_PI / 2, 2 * M_PI / 3, 5 * M_PI / 6}), 0.0, M_PI,
                         true, true, 0, "contact angles"),
                 flag("controls", true, "append perturbed-cap and wrong-angle negative controls")});
      t.push_back({"nitsche_suite", "every (H, alpha) pair of the grids", ps, run_nitsche_suite, {}});
    }
    t.push_back({"model_index",
                 "index of the asymptotic field of Re(z^n) at the origin",
                 {integers("n", json::array({3, 4, 5, 6}), 3, 12, "degrees"),
                  positive("radius", 0.1, "index circle radius"),
                  resolution("samples", 1440, "samples on the circle"),
                  choice("branch", "plus", {"plus", "minus"}, "asymptotic branch"),
                  integer("intervals", 20, 0, kInf, "random intervals for the quadrature check"),
                  positive("tol_residual", 1e-6, tol), positive("tol_variation", 1e-6, tol),
                  positive("tol_quadrature", 1e-9, tol)},
                 run_model_index,
                 {}});
    t.push_back({"annulus",
                 "catenoid annulus in the unit ball against planes",
                 {choice("input", "critical_catenoid", {"critical_catenoid", "squeezed_catenoid", "sphere_cap"}, "input surface"),
                  number("squeeze", 0.9, 0.0, 1.0, true, true, "neck factor for squeezed_catenoid"),
                  resolution("grid", 200, "sigma grid nodes per side"), positive("tol_angle", 1e-6, tol)},
                 run_annulus,
                 {}});
    const std::vector<Param> fb = {positive("neck", 1.0, "catenoid neck radius"),
                                   any_number("twist", 0.0, "use x2 = twist x1 x3 instead when nonzero"),
                                   integer("boundary_samples", 16, 2, kInf, "boundary points audited"),
                                   positive("extent", 0.8, "boundary half-length audited"),
                                   positive("tol_mixed", 1e-6, tol),
                                   positive("tol_angle", 1e-4, tol),
                                   positive("tol_seam", 1e-4, tol),
                                   flag("swap_branches", false, "glue L1 to L1 across the seam")};
    t.push_back({"free_boundary_catenoid", "half catenoid on the plane x3 = 0", fb, run_free_boundary, {}});
    t.push_back({"weingarten",
                 "ovaloid-induced Weingarten relation and its translated family",
                 {text("profile", "prolate(0.7,1.3)", "ovaloid spec"),
                  choice("relation", "induced_mean", {"induced_mean", "induced_gauss", "constant_mean"}, "relation"),
                  any_number("constant", 2.0, "constant for constant_mean"),
                  resolution("samples", 200, "relation samples"), integer("members", 8, 1, kInf, "members audited"),
                  positive("tol_relation", 1e-8, tol), positive("tol_spread", 1e-8, tol)},
                 run_weingarten,
                 [](const Params& p, const Complain& complain) {
                   try {
                     (void)families::Ovaloid::from_spec(p.str("profile"));
                   } catch (const std::exception& e) {
                     complain("profile", std::string("is not a valid ovaloid: ") + e.what());
                   }
                 }});
    t.push_back({"s3_scan",
                 "random equators of S^3 against the two-cap domain",
                 {number("r", 0.6, 0.0, M_PI / 2, true, true, "cap radius"),
                  integer("samples", 1000, 1, kInf, "equators per seed"),
                  integers("seeds", json::array(), 0, 2147483647.0, "seeds (default: the config seed)"),
                  positive("tol_spread", 1e-8, tol)},
                 run_s3_scan,
                 {}});
    t.push_back({"bers_jet",
                 "leading harmonic term of Re(alpha z^n) + c Re(z^(n+2))",
                 {integer("n", 3, 2, 8, "leading order"),
                  numbers("alpha", json::array({1.0, 0.0}), -kInf, kInf, false, false, 2, "[re, im], nonzero"),
                  any_number("perturbation", 1.0, "coefficient of Re(z^(n+2))"),
                  number("rho0", 1e-2, 0.0, 0.1, true, false, "middle jet radius"),
                  numbers("radii", json::array({4e-2, 2e-2, 1e-2}), 0.0, 0.25, true, false, 0, "consistency radii"),
                  positive("tol_alpha", 1e-4, tol)},
                 run_bers_jet,
                 [](const Params& p, const Complain& complain) {
                   const auto a = p.nums("alpha");
                   if (std::hypot(a[0], a[1]) == 0.0) complain("alpha", "must be nonzero");
                   if (p.nums("radii").size() < 2) complain("radii", "needs at least two radii");
                 }});
    t.push_back({"poincare_hopf",
                 "index sums on the sphere or torus",
                 {choice("field", "quadratic", {"quadratic", "all_negative", "torus"}, "field family"),
                  rows("factors", json::array({json::array({0.0, 0.0, 1}), json::array({1.0, 0.0, 1}),
                                                json::array({-0.5, 0.8, 1}), json::array({0.3, -0.6, -1})}),
                       3, "quadratic: [re, im, order] per zero or pole"),
                  integer("n", 3, 3, 12, "all_negative: model degree"),
                  integer("count", 2, 1, 16, "all_negative: number of singularities"),
                  resolution("samples", 1440, "samples per index circle"),
                  resolution("grid", 100, "torus: sigma grid nodes per side")},
                 run_poincare_hopf,
                 [](const Params& p, const Complain& complain) {
                   const auto fs = p.table("factors");
                   for (std::size_t i = 0; i < fs.size(); ++i) {
                     if (fs[i][2] != std::round(fs[i][2]) || fs[i][2] == 0.0)
                       complain("factors", "row " + std::to_string(i) + " needs a nonzero integer order");
                     for (std::size_t j = 0; j < i; ++j)
                       if (fs[i][0] == fs[j][0] && fs[i][1] == fs[j][1])
                         complain("factors", "rows " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
                   }
                 }});
    t.push_back({"seam",
                 "regularity of the doubled field across the seam",
                 {choice("source", "constant", {"constant", "catenoid"}, "collar field"),
                  any_number("angle", 0.3, "constant: L1 angle"),
                  flag("swap_branches", false, "glue L1 to L1 across the seam"),
                  integer("samples", 64, 8, kInf, "seam samples"), positive("tol_seam", 1e-4, tol)},
                 run_seam,
                 {}});
    t.push_back({"transitivity",
                 "unique member through random pointed planes",
                 {choice("family", "planes", {"planes", "cmc_spheres", "equators_s3", "translated_ovaloid"}, "family"),
                  any_number("H", 1.0, "cmc_spheres: mean curvature"),
                  text("profile", "prolate(0.7,1.3)", "translated_ovaloid: ovaloid spec"),
                  integer("samples", 100, 1, kInf, "pointed planes"), positive("tol_value", 1e-8, tol),
                  positive("tol_angle", 1e-8, tol)},
                 run_transitivity,
                 {}});
    t.push_back({"ellipticity",
                 "ellipticity of the graph operators at random jets",
                 {choice("equation", "minimal_graph", {"minimal_graph", "cmc_graph", "weingarten"}, "operator"),
                  any_number("H", 1.0, "cmc_graph: mean curvature"), any_number("c", 2.0, "weingarten: constant"),
                  integer("samples", 1000, 1, kInf, "random jets"), positive("jet_bound", 5.0, "jet entries in [-b, b]")},
                 run_ellipticity,
                 {}});
    t.push_back({"sigma_field",
                 "sigma grid, asymptotic fields and singularities of a preset surface",
                 {choice("surface", "graph_monkey", surface_names(), "surface preset"),
                  choice("family", "auto", {"auto", "planes", "cmc_spheres", "equators_s3"}, "comparison family"),
                  any_number("family_H", 1.0, "cmc_spheres: mean curvature"),
                  resolution("grid", 64, "nodes per side"),
                  positive("rel_tol", 1e-8, "singular threshold relative to max ||sigma||"),
                  integer("isolation_cells", 3, 1, kInf, "largest isolated cluster")},
                 run_sigma_field,
                 {}});
    return t;
  }();
  return types;
}

const ScenarioType* find_type(const std::string& type) {
  for (const auto& t : scenario_types())
    if (t.type == type) return &t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation

class Validator {
 public:
  Validator(std::string source, std::string where) : source_(std::move(source)), where_(std::move(where)) {}

  [[noreturn]] void fail(int line, const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + where_ + ": field '" + key + "' " + what);
  }

  json convert(const Param& p, const toml::Value& v) const {
    auto expect_number = [&](const toml::Value& x) {
      if (!x.is_number()) fail(x.line, p.key, "must be a number, got " + x.type_name());
      if (!p.in_range(x.as_number())) fail(x.line, p.key, "must be " + p.range_text() + ", got " + fmt(x.as_number()));
      return x.as_number();
    };
    auto expect_integer = [&](const toml::Value& x) {
      if (!x.is_int()) fail(x.line, p.key, "must be an integer, got " + x.type_name());
      const double d = x.as_number();
      if (!p.in_range(d)) fail(x.line, p.key, "must be " + p.range_text() + ", got " + fmt(d));
      return static_cast<std::int64_t>(d);
    };
    auto expect_array = [&](const toml::Value& x) -> const toml::Array& {
      if (!x.is_array()) fail(x.line, p.key, "must be an array, got " + x.type_name());
      if (p.length > 0 && p.kind != Kind::rows && int(x.as_array().size()) != p.length)
        fail(x.line, p.key, "must have " + std::to_string(p.length) + " entries");
      return x.as_array();
    };
    switch (p.kind) {
      case Kind::number: return expect_number(v);
      case Kind::integer: return expect_integer(v);
      case Kind::boolean:
        if (!v.is_bool()) fail(v.line, p.key, "must be true or false, got " + v.type_name());
        return std::get<bool>(v.data);
      case Kind::string: {
        if (!v.is_string()) fail(v.line, p.key, "must be a string, got " + v.type_name());
        const auto& s = v.as_string();
        if (!p.choices.empty() && std::find(p.choices.begin(), p.choices.end(), s) == p.choices.end()) {
          std::string list;
          for (const auto& c : p.choices) list += (list.empty() ? "" : ", ") + c;
          fail(v.line, p.key, "must be one of {" + list + "}, got '" + s + "'");
        }
        return s;
      }
      case Kind::numbers: {
        json out = json::array();
        for (const auto& x : expect_array(v)) out.push_back(expect_number(x));
        return out;
      }
      case Kind::integers: {
        json out = json::array();
        for (const auto& x : expect_array(v)) out.push_back(expect_integer(x));
        return out;
      }
      case Kind::rows: {
        json out = json::array();
        for (const auto& row : expect_array(v)) {
          if (!row.is_array() || int(row.as_array().size()) != p.length)
            fail(row.line, p.key, "rows must be arrays of " + std::to_string(p.length) + " numbers");
          json r = json::array();
          for (const auto& x : row.as_array()) r.push_back(expect_number(x));
          out.push_back(std::move(r));
        }
        return out;
      }
    }
    return nullptr;
  }

 private:
  std::string source_;
  std::string where_;
};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

Config load_config_text(const std::string& text, const std::string& source,
                        std::optional<std::uint64_t> seed_override) {
  toml::Document doc;
  try {
    doc = toml::parse(text, source);
  } catch (const toml::ParseError& e) {
    throw ConfigError(e.what());
  }
  Config cfg;
  cfg.source = source;
  cfg.hash = fnv1a_hex(text);
  auto top_fail = [&](int line, const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
  };
  for (const auto& [k, v] : doc.root.entries) {
    if (k == "seed") {
      if (!v.is_int() || v.as_number() < 0) top_fail(v.line, "field 'seed' must be a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(std::get<std::int64_t>(v.data));
    } else if (k == "title") {
      if (!v.is_string()) top_fail(v.line, "field 'title' must be a string");
    } else {
      top_fail(v.line, "unknown top-level field '" + k + "'");
    }
  }
  if (seed_override) cfg.seed = *seed_override;
  for (const auto& t : doc.tables) {
    if (t.name != "output") top_fail(t.line, "unknown table [" + t.name + "]");
    for (const auto& [k, v] : t.entries) {
      if (k != "csv" && k != "svg") top_fail(v.line, "[output]: unknown field '" + k + "'");
      if (!v.is_bool()) top_fail(v.line, "[output]: field '" + k + "' must be true or false");
      (k == "csv" ? cfg.csv : cfg.svg) = std::get<bool>(v.data);
    }
  }
  for (const auto& [n, ts] : doc.arrays)
    if (n != "scenario") top_fail(ts.front().line, "unknown array [[" + n + "]]");
  const auto* scenarios = doc.array("scenario");
  if (!scenarios || scenarios->empty()) top_fail(1, "no [[scenario]] entries");

  std::set<std::string> names;
  for (std::size_t i = 0; i < scenarios->size(); ++i) {
    const auto& t = (*scenarios)[i];
    const std::string slot = "scenario[" + std::to_string(i) + "]";
    const auto* type_v = t.find("type");
    if (!type_v) top_fail(t.line, slot + ": missing field 'type'");
    if (!type_v->is_string()) top_fail(type_v->line, slot + ": field 'type' must be a string");
    const ScenarioType* type = find_type(type_v->as_string());
    if (!type) {
      std::string list;
      for (const auto& s : scenario_types()) list += (list.empty() ? "" : ", ") + s.type;
      top_fail(type_v->line, slot + ": field 'type' must be one of {" + list + "}, got '" + type_v->as_string() + "'");
    }
    std::string name = type->type + "_" + std::to_string(i);
    if (const auto* nv = t.find("name")) {
      if (!nv->is_string() || nv->as_string().empty()) top_fail(nv->line, slot + ": field 'name' must be a non-empty string");
      name = nv->as_string();
      if (name.find_first_of("./\\") != std::string::npos)
        top_fail(nv->line, slot + ": field 'name' must not contain '.', '/' or '\\'");
    }
    if (!names.insert(name).second) top_fail(t.line, slot + ": duplicate scenario name '" + name + "'");
    const Validator val(source, slot + " '" + name + "' (" + type->type + ")");

    std::vector<Param> params = type->params;
    params.push_back(choice("expect", "pass", {"pass", "fail", "degenerate"}, "expected verdict"));
    if (type->type == "sigma_field") {
      std::string surface = "graph_monkey";
      if (const auto* sv = t.find("surface"); sv && sv->is_string()) surface = sv->as_string();
      if (const auto* preset = find_surface(surface))
        params.insert(params.end(), preset->params.begin(), preset->params.end());
    }
    Params p;
    for (const auto& par : params) p.values[par.key] = par.def;
    for (const auto& [k, v] : t.entries) {
      if (k == "type" || k == "name") continue;
      const auto it = std::find_if(params.begin(), params.end(), [&](const Param& q) { return q.key == k; });
      if (it == params.end()) val.fail(v.line, k, "is not a parameter of " + type->type);
      p.values[k] = val.convert(*it, v);
    }
    auto line_of = [&](const std::string& key) {
      const auto* v = t.find(key);
      return v ? v->line : t.line;
    };
    const Complain complain = [&](const std::string& key, const std::string& what) { val.fail(line_of(key), key, what); };
    if (type->validate) type->validate(p, complain);
    if (type->type == "sigma_field") {
      const auto* preset = find_surface(p.str("surface"));
      if (preset->name == "graph_monkey") {
        const auto a = p.nums("alpha");
        if (std::hypot(a[0], a[1]) == 0.0) complain("alpha", "must be nonzero");
      }
      if (preset->name == "equator" && Vec4(p.nums("pole").data()).norm() == 0.0) complain("pole", "must be nonzero");
      const bool s3 = preset->name == "equator";
      const std::string fam = p.str("family");
      if (fam == "equators_s3" && !s3) complain("family", "equators_s3 needs a surface in the S^3 chart");
      if (s3 && fam != "auto" && fam != "equators_s3") complain("family", fam + " lives in the Euclidean chart");
      try {
        cfg.fields.emplace(name, build_field(p));
      } catch (const std::exception& e) {
        complain("surface", std::string("cannot be built: ") + e.what());
      }
    }

    const std::string expect = p.str("expect");
    const Ctx ctx{cfg.seed};
    Job job;
    job.name = name;
    job.type = type->type;
    job.line = t.line;
    job.run = [type, p, name, expect, ctx] {
      auto entries = type->run(p, name, ctx);
      for (auto& e : entries) {
        if (e.expect.empty()) e.expect = expect;
        e.extra["config"] = p.values;
      }
      return entries;
    };
    cfg.jobs.push_back(std::move(job));
  }
  return cfg;
}

Config load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), path, seed_override);
}

json presets_catalog() {
  json cat;
  json surfaces = json::array();
  for (const auto& s : surface_presets()) {
    json params = json::array();
    for (const auto& p : s.params) params.push_back(p.describe());
    surfaces.push_back({{"name", s.name},
                        {"doc", s.doc},
                        {"chart", s.name == "equator" ? "sphere3_stereographic" : "euclidean"},
                        {"default_family", s.family},
                        {"params", params}});
  }
  cat["surfaces"] = surfaces;
  cat["domains"] = json::array(
      {{{"name", "unit_ball"}, {"chart", "euclidean"}, {"params", json::array()}},
       {{"name", "half_space"}, {"chart", "euclidean"}, {"params", json::array()}},
       {{"name", "s3_two_caps"},
        {"chart", "sphere3_stereographic"},
        {"params", json::array({number("r", 0.6, 0.0, M_PI / 2, true, true, "cap radius").describe()})}}});
  cat["families"] = json::array(
      {{{"name", "planes"}, {"chart", "euclidean"}, {"params", json::array()}},
       {{"name", "cmc_spheres"},
        {"chart", "euclidean"},
        {"params", json::array({any_number("H", 1.0, "mean curvature; 0 gives planes").describe()})}},
       {{"name", "equators_s3"}, {"chart", "sphere3_stereographic"}, {"params", json::array()}},
       {{"name", "translated_ovaloid"},
        {"chart", "euclidean"},
        {"params", json::array({text("profile", "prolate(0.7,1.3)",
                                     "round_sphere(R), prolate(a,b), dumbbell(d) or csv:<path>")
                                    .describe()})}}});
  json scenarios = json::array();
  for (const auto& t : scenario_types()) {
    json params = json::array();
    for (const auto& p : t.params) params.push_back(p.describe());
    scenarios.push_back({{"type", t.type}, {"doc", t.doc}, {"params", params}});
  }
  cat["scenarios"] = scenarios;
  cat["hash"] = fnv1a_hex(cat.dump());
  return cat;
}

index::DirectionField resolve_field(const Config& cfg, const std::string& selector,
                                    std::optional<surfaces::ParamRect>* domain) {
  static const std::regex model(R"(model\(\s*(\d+)\s*(?:,\s*(plus|minus)\s*)?\))");
  static const std::regex constant(R"(constant\(\s*([-+0-9.eE]+)\s*\))");
  static const std::regex branch(R"((.+)\.(L1|L2))");
  std::smatch m;
  if (domain) domain->reset();
  if (std::regex_match(selector, m, model)) {
    const int n = std::stoi(m[1]);
    if (n < 2) throw ConfigError("model degree must be at least 2");
    return index::model_field(n, m[2] == "minus" ? index::Branch::minus : index::Branch::plus);
  }
  if (std::regex_match(selector, m, constant)) {
    const double a = std::stod(m[1]);
    return [a](double, double) { return a; };
  }
  if (std::regex_match(selector, m, branch)) {
    const auto it = cfg.fields.find(m[1]);
    if (it == cfg.fields.end())
      throw ConfigError("selector '" + selector + "': no sigma_field scenario named '" + std::string(m[1]) + "'");
    const FieldSource src = it->second;
    if (domain) *domain = src.rect;
    const bool first = m[2] == "L1";
    return [src, first](double u, double v) {
      const Mat2 s = sigma::sigma_at(src.chart, src.param, src.family, u, v);
      const Mat2 g = geometry::fundamental_forms(src.chart, src.param, u, v).first;
      const auto d = sigma::asymptotic_directions(s, g, 1e-10);
      return first ? d.first : d.second;
    };
  }
  throw ConfigError("unknown field selector '" + selector + "' (expected model(n[,minus]), constant(theta) or <scenario>.L1/.L2)");
}

}  // namespace caplab::cli
