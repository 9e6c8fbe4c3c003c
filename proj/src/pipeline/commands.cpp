#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "isotherm/content.hpp"
#include "isotherm/errors.hpp"
#include "isotherm/invariants.hpp"
#include "isotherm/pipeline.hpp"

namespace isotherm {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      text_ << (first ? "" : ",") << h;
      first = false;
    }
    text_ << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((text_ << (first ? "" : ",") << cell(cells), first = false), ...);
    text_ << '\n';
  }
  std::string str() const { return text_.str(); }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ostringstream text_;
};

struct Context {
  const ExperimentConfig& config;
  SurfaceChart chart;
  fs::path out;
  std::ostream& log;
  std::vector<std::string> failures;

  void write(const std::string& name, const std::string& text) const {
    fs::create_directories(out);
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (out / name).string());
    f << text;
  }
  void write(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
  void fail(const std::string& stage, const std::string& what) {
    failures.push_back(stage + ": " + what);
    log << "FAIL " << stage << ": " << what << '\n';
  }
};

json vec(const Vec3& p) { return {p.x(), p.y(), p.z()}; }
json uv_json(ChartPoint p) { return {p.u, p.v}; }
json estimate(const Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }

FieldOptions field_options(const ExperimentConfig& c, std::vector<double> times) {
  FieldOptions o;
  o.quadrature.samples = c.kernel_samples;
  o.quadrature.seed = c.seed;
  o.quadrature.workers = c.workers;
  o.times = std::move(times);
  o.line.cells = c.line_cells;
  o.grid.spacing = c.grid_spacing;
  o.grid.workers = c.workers;
  return o;
}

BallQuadrature ball_quadrature(const ExperimentConfig& c) {
  BallQuadrature q;
  q.samples = c.content_samples;
  q.seed = c.seed;
  q.workers = c.workers;
  return q;
}

HeatProblemSpec problem_spec(const Context& ctx, Problem problem) {
  return {problem, ctx.chart, ctx.config.R, 3, {}};
}

std::vector<Vec3> center_points(const Context& ctx) {
  std::vector<Vec3> pts;
  for (const ChartPoint& uv : config_centers(ctx.config, ctx.chart)) pts.push_back(ctx.chart.point(uv));
  return pts;
}

json diagnostics_json(const TemperatureField& f) {
  json d = json::object();
  for (const auto& [k, v] : f.diagnostics) d[k] = v;
  return d;
}

// ---------------------------------------------------------------------------

json stage_geometry(Context& ctx) {
  const SampleRegion region = config_region(ctx.config, ctx.chart);
  const BoundCheck check = curvature_bound_check(ctx.chart, region, ctx.config.R);
  Csv csv({"u", "v", "x", "y", "z", "k1", "k2", "H", "K"});
  for (const ChartPoint uv : region.points()) {
    const Vec3 p = ctx.chart.point(uv);
    const CurvaturePair k = principal_curvatures(ctx.chart, uv);
    csv.row(uv.u, uv.v, p.x(), p.y(), p.z(), k.k1(), k.k2(), k.mean(), k.gauss());
  }
  ctx.write("geometry.csv", csv.str());
  json j = {{"surface", ctx.chart.label()},
            {"R", ctx.config.R},
            {"pass", check.pass},
            {"sup_R_abs_k", check.sup_scaled},
            {"worst_uv", uv_json(check.worst)},
            {"samples", check.samples}};
  ctx.write("geometry.json", j);
  if (!check.pass) {
    std::ostringstream os;
    os << "curvature bound fails on " << ctx.chart.label() << " with R = " << ctx.config.R
       << ": sup R*max|k| = " << check.sup_scaled << " >= 1 at (" << check.worst.u << ", "
       << check.worst.v << ")";
    throw DomainError(os.str());
  }
  ctx.log << "geometry: " << ctx.chart.label() << " R=" << ctx.config.R
          << " bound holds, sup R*max|k| = " << num(check.sup_scaled) << '\n';
  return j;
}

json stage_solve(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const TemperatureField field =
      make_field(problem_spec(ctx, c.problem), field_options(c, c.solve_times));
  const auto range = field.range();
  Csv csv({"center_id", "s", "x", "y", "z", "t", "value", "error"});
  double excursion = 0.0;
  const auto centers = config_centers(c, ctx.chart);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const FootPointPair fp = foot_points(ctx.chart, centers[i], c.R);
    const Vec3 normal = (fp.plus - fp.base) / c.R;
    for (double s : {-0.75, -0.25, 0.0, 0.25, 0.75}) {
      const Vec3 p = fp.base + s * c.R * normal;
      for (double t : c.solve_times) {
        const Estimate e = field.value(p, t);
        csv.row(i, s, p.x(), p.y(), p.z(), t, e.value, e.error);
        const double slack = c.tolerances.range + 3.0 * e.error;
        excursion = std::max({excursion, range.lo - slack - e.value, e.value - range.hi - slack});
      }
    }
  }
  ctx.write("probes.csv", csv.str());
  json j = {{"field", field.id()},
            {"provenance", to_string(field.provenance())},
            {"range", {range.lo, range.hi}},
            {"max_range_excursion", excursion},
            {"seed", c.seed},
            {"diagnostics", diagnostics_json(field)}};
  ctx.write("solve.json", j);
  if (excursion > 0.0)
    ctx.fail("solve", "values leave the data range by " + num(excursion));
  ctx.log << "solve: " << field.id() << " [" << to_string(field.provenance())
          << "], max range excursion " << num(excursion) << '\n';
  return j;
}

double calibrated_cN(const ExperimentConfig& c, Family family) {
  return calibrate_cN(c.R, 3, family, c.times).cN;
}

json fit_json(const PowerLawFit& fit) {
  return {{"p", fit.exponent},
          {"A", fit.amplitude},
          {"residual", fit.residual},
          {"window", {fit.t_min, fit.t_max}},
          {"points", fit.points}};
}

// Fits of the aux contents at the first center, compared with the product
// formula evaluated through the offset curvatures.
json aux_fits(Context& ctx, const std::string& stage) {
  const ExperimentConfig& c = ctx.config;
  const ChartPoint uv0 = config_centers(c, ctx.chart).front();
  const Vec3 x0 = ctx.chart.point(uv0);
  const OffsetCurvatures off = offset_curvatures(principal_curvatures(ctx.chart, uv0), c.R);
  const double cN = calibrated_cN(c, Family::cauchy);
  json fits;
  for (Problem p : {Problem::aux_plus, Problem::aux_minus}) {
    const TemperatureField f = make_field(problem_spec(ctx, p), field_options(c, {}));
    const HeatContentSeries s = heat_content_series(f, x0, c.R, c.times, ball_quadrature(c));
    const PowerLawFit fit = fit_power_law(s);
    const Estimate A = extrapolate_amplitude(s, 1.0);
    const double predicted =
        predicted_amplitude(p == Problem::aux_plus ? off.plus : off.minus, c.R, cN);
    json j = fit_json(fit);
    j["amplitude_extrapolated"] = estimate(A);
    j["amplitude_predicted"] = predicted;
    j["amplitude_ratio"] = A.value / predicted;
    j["seed"] = c.seed;
    fits[to_string(p)] = j;
    if (std::abs(fit.exponent - 1.0) > c.tolerances.exponent)
      ctx.fail(stage, to_string(p) + " exponent " + num(fit.exponent) + " differs from 1 by more than " +
                          num(c.tolerances.exponent));
    if (std::abs(A.value / predicted - 1.0) > c.tolerances.amplitude_ratio)
      ctx.fail(stage, to_string(p) + " amplitude " + num(A.value) + " vs predicted " + num(predicted));
    ctx.log << stage << ": " << to_string(p) << " p = " << num(fit.exponent)
            << ", A/A_pred = " << num(A.value / predicted) << '\n';
  }
  fits["cN"] = cN;
  return fits;
}

json stage_content(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const TemperatureField field = make_field(problem_spec(ctx, c.problem), field_options(c, [&] {
                                              std::vector<double> t(c.times.rbegin(), c.times.rend());
                                              return t;
                                            }()));
  Csv csv({"surface", "problem", "center_id", "t", "Q", "Q_err"});
  const auto centers = center_points(ctx);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const HeatContentSeries s = heat_content_series(field, centers[i], c.R, c.times, ball_quadrature(c));
    for (std::size_t k = 0; k < s.times.size(); ++k)
      csv.row(ctx.chart.label(), to_string(c.problem), i, s.times[k], s.values[k].value,
              s.values[k].error);
  }
  ctx.write("content.csv", csv.str());
  json j = {{"field", field.id()}, {"seed", c.seed}, {"fits", aux_fits(ctx, "content")}};
  ctx.write("content.json", j);
  return j;
}

json stage_balance(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const TemperatureField field =
      make_field(problem_spec(ctx, c.problem), field_options(c, c.balance_times));
  const auto centers = center_points(ctx);
  const BalanceReport r =
      balance_law_report(field, centers, c.R, c.balance_times, ball_quadrature(c), c.tolerances.balance);
  Csv csv({"t", "center_id", "Q", "Q_err", "trace", "trace_err"});
  json rows = json::array();
  for (const BalanceRow& row : r.rows) {
    for (std::size_t i = 0; i < centers.size(); ++i)
      csv.row(row.t, i, row.contents[i].value, row.contents[i].error, row.traces[i].value,
              row.traces[i].error);
    const bool violated = row.significant && row.spread > c.tolerances.balance;
    rows.push_back({{"t", row.t},
                    {"mean", row.mean},
                    {"spread", row.spread},
                    {"noise", row.noise},
                    {"significant", row.significant},
                    {"resolved", row.resolved},
                    {"status", violated ? "violated" : (row.resolved ? "balanced" : "inconclusive")}});
    ctx.log << "balance: t = " << num(row.t) << " spread " << num(row.spread) << " noise "
            << num(row.noise) << (violated ? " violated" : row.resolved ? " balanced" : " inconclusive")
            << '\n';
  }
  ctx.write("balance.csv", csv.str());
  json centers_json = json::array();
  for (const Vec3& p : centers) centers_json.push_back(vec(p));
  json j = {{"field", field.id()},
            {"R", c.R},
            {"centers", centers_json},
            {"rows", rows},
            {"max_spread", r.max_spread},
            {"max_trace_spread", r.max_trace_spread},
            {"max_abs_trace", r.max_abs_trace},
            {"seed", c.seed},
            {"samples", c.content_samples}};
  ctx.write("balance.json", j);
  return j;
}

json report_json(const InvariantReport& r) {
  auto stats = [](const InvariantStats& s) {
    return json{{"mean", s.mean},
                {"std", s.std},
                {"relative_std", s.relative_std},
                {"max_deviation", s.max_deviation},
                {"min", s.min},
                {"max", s.max}};
  };
  json tags = json::array();
  for (VerdictTag t : r.verdict.tags) tags.push_back(to_string(t));
  return {{"surface", r.surface},
          {"R", r.R},
          {"invariant", to_string(r.which)},
          {"samples", r.samples.size()},
          {"phi_sum", stats(r.sum)},
          {"phi_diff", stats(r.diff)},
          {"verdict",
           {{"tags", tags},
            {"constant", r.verdict.constant},
            {"c", r.verdict.c},
            {"inf_H", r.verdict.inf_H},
            {"sup_H", r.verdict.sup_H},
            {"inf_abs_H", r.verdict.inf_abs_H},
            {"inf_gap", r.verdict.inf_gap},
            {"umbilic_sequence_witness", r.verdict.witness},
            {"note", r.verdict.note},
            {"constancy_threshold", r.thresholds.relative_std}}}};
}

ConstancyThresholds thresholds(const Tolerances& t) {
  ConstancyThresholds th;
  th.relative_std = t.constancy;
  th.equality = t.equality;
  th.umbilic = t.umbilic;
  return th;
}

struct InvariantStage {
  json j;
  InvariantReport sum, diff;
};

InvariantStage stage_invariants(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SampleRegion region = config_region(c, ctx.chart);
  InvariantStage s{json::object(),
                   constancy_report(ctx.chart, region, c.R, InvariantKind::sum, thresholds(c.tolerances)),
                   constancy_report(ctx.chart, region, c.R, InvariantKind::diff, thresholds(c.tolerances))};
  Csv csv({"u", "v", "k1", "k2", "phi_sum", "phi_diff", "H"});
  double identity = 0.0, slack = std::numeric_limits<double>::infinity(), two_point = 0.0;
  for (const InvariantSample& x : s.sum.samples) {
    csv.row(x.uv.u, x.uv.v, x.pair.k1(), x.pair.k2(), x.phi_sum, x.phi_diff, x.pair.mean());
    identity = std::max(identity, std::abs(product_identity_check(x.pair, c.R)));
    slack = std::min(slack, amgm_certificate(x.pair, c.R));
    two_point = std::max(two_point, std::abs(x.phi_sum - phi_sum_two_point(x.pair, c.R)));
  }
  ctx.write("invariant_samples.csv", csv.str());
  const UmbilicScan umb = umbilic_scan(ctx.chart, region, c.tolerances.umbilic);
  s.j = {{"sum", report_json(s.sum)},
         {"diff", report_json(s.diff)},
         {"identity_residual", identity},
         {"amgm_min_slack", slack},
         {"two_point_residual", two_point},
         {"umbilics", umb.umbilics.size()},
         {"inf_gap", umb.inf_gap},
         {"witness", umb.witness}};
  ctx.write("invariants.json", s.j);
  if (identity > c.tolerances.identity)
    ctx.fail("invariants", "phi_diff*phi_sum + 4RH reaches " + num(identity));
  if (slack < -c.tolerances.identity) ctx.fail("invariants", "AM-GM slack " + num(slack) + " < 0");
  if (two_point > c.tolerances.identity)
    ctx.fail("invariants", "two-point form differs by " + num(two_point));
  for (const auto& [which, tag] : c.expect) {
    const Verdict& v = which == "sum" ? s.sum.verdict : s.diff.verdict;
    bool found = false;
    for (VerdictTag t : v.tags) found = found || to_string(t) == tag;
    if (!found) ctx.fail("invariants", which + " verdict lacks expected tag " + tag);
  }
  for (const InvariantReport* r : {&s.sum, &s.diff}) {
    ctx.log << "invariants: phi_" << to_string(r->which) << " mean " << num(r->verdict.c)
            << " rel.std " << num((r->which == InvariantKind::sum ? r->sum : r->diff).relative_std)
            << " ->";
    for (VerdictTag t : r->verdict.tags) ctx.log << ' ' << to_string(t);
    ctx.log << '\n';
  }
  return s;
}

json stage_calibrate(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  json families;
  for (Family family : {Family::cauchy, Family::ibvp}) {
    const std::string name = family == Family::cauchy ? "cauchy" : "ibvp";
    json entries = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double R : c.calibration_R) {
      const Calibration cal = calibrate_cN(R, 3, family, c.times);
      entries.push_back({{"R", R},
                         {"cN", cal.cN},
                         {"amplitude", estimate(cal.amplitude)},
                         {"fit", fit_json(cal.fit)}});
      lo = std::min(lo, cal.cN);
      hi = std::max(hi, cal.cN);
      if (!(cal.cN > 0.0)) ctx.fail("calibrate", name + " c(3) is not positive");
    }
    const double spread = (hi - lo) / std::max(std::abs(0.5 * (hi + lo)), spread_floor);
    families[name] = {{"entries", entries}, {"spread", spread}};
    if (spread > c.tolerances.calibration)
      ctx.fail("calibrate", name + " c(3) varies by " + num(spread) + " across R");
    ctx.log << "calibrate: " << name << " c(3) in [" << num(lo) << ", " << num(hi) << "], spread "
            << num(spread) << '\n';
  }
  json j = {{"dimension", 3}, {"times", c.times}, {"families", families}};
  ctx.write("calibration.json", j);
  return j;
}

bool main_problem(Problem p) {
  return p == Problem::ibvp_ones || p == Problem::cauchy_sum || p == Problem::ibvp_pm ||
         p == Problem::cauchy_diff;
}

json stage_verify(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  json stages;
  stages["geometry"] = stage_geometry(ctx);
  const InvariantStage inv = stage_invariants(ctx);
  stages["invariants"] = inv.j;
  const json balance = stage_balance(ctx);
  stages["balance"] = balance;

  if (main_problem(c.problem)) {
    const bool signed_problem = is_signed(c.problem);
    const InvariantReport& rep = signed_problem ? inv.diff : inv.sum;
    bool violated = false, unresolved = false;
    for (const json& row : balance["rows"]) {
      violated = violated || row["status"] == "violated";
      unresolved = unresolved || row["status"] == "inconclusive";
    }
    std::string consistency;
    if (rep.verdict.constant && violated) {
      consistency = "inconsistent";
      ctx.fail("balance", "balance law fails although phi_" + to_string(rep.which) + " is constant");
    } else if (!rep.verdict.constant && !violated) {
      consistency = unresolved ? "inconclusive" : "inconsistent";
      ctx.fail("balance", unresolved
                              ? "spread not resolved by the quadrature; raise content_samples"
                              : "balance law holds although phi_" + to_string(rep.which) + " varies");
    } else {
      consistency = rep.verdict.constant ? "stationary_candidate" : "not_stationary";
    }
    stages["consistency"] = {{"invariant", to_string(rep.which)},
                             {"constant", rep.verdict.constant},
                             {"balance_violated", violated},
                             {"verdict", consistency}};
    if (signed_problem && inv.diff.verdict.has(VerdictTag::minimal_c_zero)) {
      const double trace = balance["max_abs_trace"].get<double>();
      stages["trace"] = {{"max_abs_trace", trace}, {"tolerance", c.tolerances.trace}};
      if (trace >= c.tolerances.trace)
        ctx.fail("trace", "boundary trace " + num(trace) + " should vanish");
    }
  }
  const SurfaceKind kind = ctx.chart.kind();
  if (kind == SurfaceKind::plane || kind == SurfaceKind::sphere) stages["fit"] = aux_fits(ctx, "fit");
  return stages;
}

template <class F>
auto staged(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError("[" + stage + "] " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("[" + stage + "] " + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError("[" + stage + "] " + e.what());
  }
}

}  // namespace

int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    Context ctx{config, staged("config", [&] { return config_chart(config); }), fs::path(config.out),
                out, {}};
    ctx.write("config.resolved.json", dump_config(config));
    if (name == "geometry") {
      staged(name, [&] { return stage_geometry(ctx); });
    } else if (name == "solve") {
      staged(name, [&] { return stage_solve(ctx); });
    } else if (name == "content") {
      staged(name, [&] { return stage_content(ctx); });
    } else if (name == "balance") {
      staged(name, [&] { return stage_balance(ctx); });
    } else if (name == "invariants") {
      staged(name, [&] { return stage_invariants(ctx).j; });
    } else if (name == "calibrate") {
      staged(name, [&] { return stage_calibrate(ctx); });
    } else if (name == "verify") {
      const json stages = staged(name, [&] { return stage_verify(ctx); });
      json report = {{"config", json::parse(dump_config(config))},
                     {"stages", stages},
                     {"failures", ctx.failures},
                     {"pass", ctx.failures.empty()}};
      ctx.write("verify.json", report);
    } else {
      throw ConfigError("unknown subcommand '" + name + "'");
    }
    if (!ctx.failures.empty()) {
      err << name << ": " << ctx.failures.size() << " check(s) failed\n";
      return 1;
    }
    out << name << ": pass\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "geometry error: " << e.what() << '\n';
    return 2;
  } catch (const AssertionFailure& e) {
    err << "assertion failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "evaluation failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace isotherm
