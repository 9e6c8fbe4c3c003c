#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isotherm/content.hpp"
#include "isotherm/errors.hpp"
#include "isotherm/pipeline.hpp"

namespace isotherm {

using json = nlohmann::json;
using std::numbers::pi;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

double positive(const json& j, const char* key, double fallback) {
  double v = fallback;
  read(j, key, v);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("surface parameter '") + key + "' must be positive");
  return v;
}

SurfaceParams parse_surface(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("surface needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "plane") {
    only_keys(j, {"kind", "half_extent"}, "surface");
    return PlaneParams{positive(j, "half_extent", PlaneParams{}.half_extent)};
  }
  if (kind == "sphere") {
    only_keys(j, {"kind", "radius"}, "surface");
    return SphereParams{positive(j, "radius", SphereParams{}.radius)};
  }
  if (kind == "cylinder") {
    only_keys(j, {"kind", "radius", "half_length"}, "surface");
    return CylinderParams{positive(j, "radius", 1.0), positive(j, "half_length", 8.0)};
  }
  if (kind == "torus") {
    only_keys(j, {"kind", "a", "b"}, "surface");
    return TorusParams{positive(j, "a", 1.0), positive(j, "b", 3.0)};
  }
  if (kind == "helicoid") {
    only_keys(j, {"kind", "b", "half_width", "half_turns"}, "surface");
    return HelicoidParams{positive(j, "b", 1.0), positive(j, "half_width", 6.0),
                          positive(j, "half_turns", 1.0)};
  }
  if (kind == "graph") {
    only_keys(j, {"kind", "amplitude", "kx", "ky", "half_extent"}, "surface");
    return GraphParams{positive(j, "amplitude", 0.1), positive(j, "kx", 1.0),
                       positive(j, "ky", 1.0), positive(j, "half_extent", 2.0 * pi)};
  }
  throw ConfigError("unknown surface kind '" + kind + "'");
}

json surface_json(const SurfaceParams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlaneParams>)
          return {{"kind", "plane"}, {"half_extent", p.half_extent}};
        else if constexpr (std::is_same_v<T, SphereParams>)
          return {{"kind", "sphere"}, {"radius", p.radius}};
        else if constexpr (std::is_same_v<T, CylinderParams>)
          return {{"kind", "cylinder"}, {"radius", p.radius}, {"half_length", p.half_length}};
        else if constexpr (std::is_same_v<T, TorusParams>)
          return {{"kind", "torus"}, {"a", p.tube_radius}, {"b", p.center_radius}};
        else if constexpr (std::is_same_v<T, HelicoidParams>)
          return {{"kind", "helicoid"},
                  {"b", p.pitch},
                  {"half_width", p.half_width},
                  {"half_turns", p.half_turns}};
        else
          return {{"kind", "graph"},
                  {"amplitude", p.amplitude},
                  {"kx", p.kx},
                  {"ky", p.ky},
                  {"half_extent", p.half_extent}};
      },
      params);
}

#define ISOTHERM_TOLERANCES(X)                                                             \
  X(constancy) X(equality) X(umbilic) X(balance) X(exponent) X(amplitude_ratio) X(calibration) \
  X(trace) X(sandwich_ibvp) X(range) X(identity)

Tolerances parse_tolerances(const json& j) {
  std::set<std::string> keys;
#define X(name) keys.insert(#name);
  ISOTHERM_TOLERANCES(X)
#undef X
  only_keys(j, keys, "tolerances");
  Tolerances t;
#define X(name)                                                                 \
  read(j, #name, t.name);                                                       \
  if (!(t.name > 0.0)) throw ConfigError("tolerance '" #name "' must be positive");
  ISOTHERM_TOLERANCES(X)
#undef X
  return t;
}

json tolerances_json(const Tolerances& t) {
  json j;
#define X(name) j[#name] = t.name;
  ISOTHERM_TOLERANCES(X)
#undef X
  return j;
}

void check_times(const std::vector<double>& times, bool increasing, const std::string& what) {
  if (times.empty()) throw ConfigError(what + " must not be empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i]))
      throw ConfigError(what + " must be positive and finite");
    if (i > 0 && (increasing ? !(times[i] > times[i - 1]) : !(times[i] < times[i - 1])))
      throw ConfigError(what + " must be strictly " + (increasing ? "increasing" : "decreasing"));
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j,
            {"surface", "R", "problem", "times", "solve_times", "balance_times", "calibration_R",
             "seed", "content_samples", "kernel_samples", "workers", "nu", "nv", "region",
             "centers", "line_cells", "grid_spacing", "tolerances", "expect", "out"},
            "config");
  ExperimentConfig c;
  if (j.contains("surface")) c.surface = parse_surface(j.at("surface"));
  read(j, "R", c.R);
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem").get<std::string>());
  read(j, "times", c.times);
  read(j, "solve_times", c.solve_times);
  read(j, "balance_times", c.balance_times);
  read(j, "calibration_R", c.calibration_R);
  read(j, "seed", c.seed);
  read(j, "content_samples", c.content_samples);
  read(j, "kernel_samples", c.kernel_samples);
  read(j, "workers", c.workers);
  read(j, "nu", c.nu);
  read(j, "nv", c.nv);
  read(j, "line_cells", c.line_cells);
  read(j, "grid_spacing", c.grid_spacing);
  read(j, "out", c.out);
  if (j.contains("region")) {
    std::vector<double> r;
    read(j, "region", r);
    if (r.size() != 4 || !(r[1] > r[0]) || !(r[3] > r[2]))
      throw ConfigError("region must be [u_min, u_max, v_min, v_max] with min < max");
    c.region = SampleRegion{r[0], r[1], r[2], r[3], c.nu, c.nv};
  }
  if (j.contains("centers")) {
    std::vector<std::array<double, 2>> centers;
    read(j, "centers", centers);
    for (const auto& p : centers) c.centers.push_back({p[0], p[1]});
  }
  if (j.contains("tolerances")) c.tolerances = parse_tolerances(j.at("tolerances"));
  if (j.contains("expect")) {
    only_keys(j.at("expect"), {"sum", "diff"}, "expect");
    read(j, "expect", c.expect);
  }

  if (!(c.R > 0.0) || !std::isfinite(c.R)) throw ConfigError("R must be positive");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.nu < 2 || c.nv < 2) throw ConfigError("nu and nv must be at least 2");
  if (c.content_samples < 16 || c.kernel_samples < 16)
    throw ConfigError("sample budgets must be at least 16");
  if (c.line_cells < 8) throw ConfigError("line_cells must be at least 8");
  if (!(c.grid_spacing > 0.0)) throw ConfigError("grid_spacing must be positive");

  if (c.times.empty()) c.times = geometric_times();
  if (c.solve_times.empty()) c.solve_times = {0.01, 0.05, 0.1};
  if (c.balance_times.empty()) c.balance_times = {0.01};
  if (c.calibration_R.empty()) c.calibration_R = {0.5, 1.0};
  check_times(c.times, false, "times");
  check_times(c.solve_times, true, "solve_times");
  check_times(c.balance_times, true, "balance_times");
  for (double r : c.calibration_R)
    if (!(r > 0.0)) throw ConfigError("calibration_R entries must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json j;
  j["surface"] = surface_json(c.surface);
  j["R"] = c.R;
  j["problem"] = to_string(c.problem);
  j["times"] = c.times;
  j["solve_times"] = c.solve_times;
  j["balance_times"] = c.balance_times;
  j["calibration_R"] = c.calibration_R;
  j["seed"] = c.seed;
  j["content_samples"] = c.content_samples;
  j["kernel_samples"] = c.kernel_samples;
  j["workers"] = c.workers;
  j["nu"] = c.nu;
  j["nv"] = c.nv;
  if (c.region)
    j["region"] = std::vector<double>{c.region->u_min, c.region->u_max, c.region->v_min,
                                      c.region->v_max};
  json centers = json::array();
  for (const ChartPoint& p : c.centers) centers.push_back({p.u, p.v});
  j["centers"] = centers;
  j["line_cells"] = c.line_cells;
  j["grid_spacing"] = c.grid_spacing;
  j["tolerances"] = tolerances_json(c.tolerances);
  j["expect"] = c.expect;
  j["out"] = c.out;
  return j.dump(2) + "\n";
}

SurfaceChart config_chart(const ExperimentConfig& config) { return make_surface(config.surface); }

SampleRegion config_region(const ExperimentConfig& config, const SurfaceChart& chart) {
  SampleRegion r = config.region ? *config.region : SampleRegion::whole(chart);
  r.nu = config.nu;
  r.nv = config.nv;
  return r;
}

std::vector<ChartPoint> config_centers(const ExperimentConfig& config, const SurfaceChart& chart) {
  if (!config.centers.empty()) return config.centers;
  switch (chart.kind()) {
    case SurfaceKind::plane: return {{0.0, 0.0}, {1.5, -0.7}, {-2.0, 2.0}};
    case SurfaceKind::sphere: return {{pi / 2, 0.0}, {pi / 3, 1.0}, {2 * pi / 3, 2.5}, {1.0, 4.0}};
    case SurfaceKind::cylinder: return {{0.0, 0.0}, {pi / 2, 1.0}, {pi, -1.0}};
    // outer equator, top, inner equator
    case SurfaceKind::torus: return {{0.0, 0.0}, {pi / 2, 1.0}, {pi, 2.0}};
    case SurfaceKind::helicoid: return {{0.0, 0.5}, {0.5, -1.0}, {1.0, 0.0}, {1.0, 2.0}};
    case SurfaceKind::graph: return {{0.0, 0.0}, {pi / 2, pi / 2}, {1.0, -0.5}};
  }
  return {};
}

}  // namespace isotherm
