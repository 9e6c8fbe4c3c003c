#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Sparse>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Box {
  std::array<double, 3> lo{}, hi{};
};

// Node states: index >= 0 is an unknown; otherwise the node carries a
// Dirichlet value (beyond Gamma+ or Gamma-) or was not resolved.
struct Grid {
  Box box;
  double h = 0.1;
  std::array<int, 3> n{};  // nodes per axis
  std::vector<double> sd;  // signed distance, NaN when projection failed
  std::vector<long> unknown;
  std::size_t unknowns = 0;
  std::size_t unresolved = 0;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
  std::size_t nodes() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
};

Box default_box(const SurfaceChart& chart, double R, double h, double t_max, double lateral) {
  Box b;
  b.lo.fill(std::numeric_limits<double>::infinity());
  b.hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& node : chart.coarse_grid())
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], node.second[a]);
      b.hi[a] = std::max(b.hi[a], node.second[a]);
    }
  const Vec3 o = chart.origin();
  const double L = lateral > 0.0 ? lateral : std::sqrt(4.0 * t_max * std::log(1e12));
  for (int a = 0; a < 3; ++a) {
    b.lo[a] += o[a] - R - 2.0 * h;
    b.hi[a] += o[a] + R + 2.0 * h;
    if (chart.unbounded()) {
      b.lo[a] = std::max(b.lo[a], o[a] - L);
      b.hi[a] = std::min(b.hi[a], o[a] + L);
    }
  }
  return b;
}

Grid build_grid(const SurfaceChart& chart, double R, const Box& box, double h, int workers,
                const ProjectionOptions& projection) {
  Grid g;
  g.h = h;
  g.box = box;
  for (int a = 0; a < 3; ++a) {
    g.n[a] = static_cast<int>(std::floor((box.hi[a] - box.lo[a]) / h + 1e-9)) + 1;
    if (g.n[a] < 3) throw ConfigError("grid box is thinner than two cells");
    g.box.hi[a] = box.lo[a] + h * (g.n[a] - 1);
  }
  g.sd.assign(g.nodes(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<std::size_t>(g.n[2]), workers, [&](std::size_t k) {
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const Vec3 p(g.box.lo[0] + h * i, g.box.lo[1] + h * j, g.box.lo[2] + h * k);
        try {
          g.sd[g.index(i, j, static_cast<int>(k))] = signed_distance(p, chart, projection).distance;
        } catch (const EvaluationError&) {
        }
      }
  });
  g.unknown.assign(g.nodes(), -1);
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    if (std::isnan(g.sd[m])) {
      ++g.unresolved;
      continue;
    }
    if (std::abs(g.sd[m]) < R) g.unknown[m] = static_cast<long>(g.unknowns++);
  }
  if (g.unknowns == 0) throw ConfigError("grid box contains no point of the tube");
  return g;
}

double boundary_value(double sd, BoundaryValues values) {
  return sd > 0.0 ? values.plus : values.minus;
}

// Discrete Laplacian on the unknowns plus the constant Dirichlet contribution.
void assemble(const Grid& g, double R, BoundaryValues values, SparseMatrix& L, Eigen::VectorXd& b) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.unknowns * 7);
  b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.unknowns));
  const double h2 = g.h * g.h;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const std::size_t m = g.index(i, j, k);
        const long row = g.unknown[m];
        if (row < 0) continue;
        const double phi_i = R - std::abs(g.sd[m]);
        const std::array<int, 3> c{i, j, k};
        for (int a = 0; a < 3; ++a) {
          // each side: fraction of h to the neighbour and what sits there
          struct Side {
            bool present = false;
            double theta = 1.0;
            long col = -1;
            double dirichlet = 0.0;
          };
          std::array<Side, 2> side;
          for (int s = 0; s < 2; ++s) {
            std::array<int, 3> q = c;
            q[a] += s == 0 ? -1 : 1;
            if (q[a] < 0 || q[a] >= g.n[a]) continue;  // box face: zero flux
            const std::size_t mq = g.index(q[0], q[1], q[2]);
            Side& sd = side[s];
            sd.present = true;
            if (g.unknown[mq] >= 0) {
              sd.col = g.unknown[mq];
            } else {
              const double sdq = std::isnan(g.sd[mq]) ? g.sd[m] : g.sd[mq];
              const double phi_j = R - std::abs(sdq);
              sd.theta = std::clamp(phi_i / (phi_i - phi_j), 1e-3, 1.0);
              sd.dirichlet = boundary_value(sdq, values);
            }
          }
          if (!side[0].present) side[0] = side[1];
          if (!side[1].present) side[1] = side[0];
          const double tm = side[0].theta, tp = side[1].theta;
          const std::array<double, 2> w{2.0 / (h2 * tm * (tm + tp)), 2.0 / (h2 * tp * (tm + tp))};
          for (int s = 0; s < 2; ++s) {
            trips.emplace_back(row, row, -w[s]);
            if (side[s].col >= 0)
              trips.emplace_back(row, side[s].col, w[s]);
            else
              b[row] += w[s] * side[s].dirichlet;
          }
        }
      }
  L.resize(static_cast<Eigen::Index>(g.unknowns), static_cast<Eigen::Index>(g.unknowns));
  L.setFromTriplets(trips.begin(), trips.end());
}

struct GridRun {
  Grid grid;
  BoundaryValues values;
  std::vector<double> times;             // 0 followed by the output times
  std::vector<Eigen::VectorXd> states;   // one per entry of times
  std::size_t steps = 0;
  double dt = 0.0;
  int max_iterations = 0;

  double node_value(std::size_t row, std::size_t m) const {
    const long u = grid.unknown[m];
    if (u >= 0) return states[row][u];
    if (std::isnan(grid.sd[m])) return values.plus;
    return boundary_value(grid.sd[m], values);
  }

  double at(std::size_t row, const Vec3& p) const {
    std::array<int, 3> base{};
    std::array<double, 3> f{};
    for (int a = 0; a < 3; ++a) {
      const double s = std::clamp((p[a] - grid.box.lo[a]) / grid.h, 0.0, grid.n[a] - 1.0);
      base[a] = std::min(static_cast<int>(s), grid.n[a] - 2);
      f[a] = s - base[a];
    }
    double v = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
      double w = 1.0;
      std::array<int, 3> q = base;
      for (int a = 0; a < 3; ++a) {
        const bool up = (corner >> a) & 1;
        q[a] += up;
        w *= up ? f[a] : 1.0 - f[a];
      }
      if (w != 0.0) v += w * node_value(row, grid.index(q[0], q[1], q[2]));
    }
    return v;
  }

  double value(const Vec3& p, double t) const {
    if (!(t >= 0.0) || t > times.back() * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "time " << t << " outside the solved horizon [0, " << times.back() << "]";
      throw DomainError(os.str());
    }
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) it = std::prev(times.end());
    const auto row = static_cast<std::size_t>(it - times.begin());
    if (row == 0 || std::abs(*it - t) <= 1e-12 * std::max(1.0, t)) return at(row, p);
    const double ft = (t - times[row - 1]) / (times[row] - times[row - 1]);
    return (1.0 - ft) * at(row - 1, p) + ft * at(row, p);
  }
};

GridRun run(const SurfaceChart& chart, double R, BoundaryValues values, const Box& box, double h,
            std::span<const double> times, const TimeStepping& stepping, const GridSpec& spec,
            const ProjectionOptions& projection) {
  GridRun out{build_grid(chart, R, box, h, spec.workers, projection), values, {}, {}, 0, 0.0, 0};
  SparseMatrix L;
  Eigen::VectorXd g;
  assemble(out.grid, R, values, L, g);

  const auto n = static_cast<Eigen::Index>(out.grid.unknowns);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  out.times.push_back(0.0);
  out.states.push_back(u);
  out.dt = std::min(stepping.max_dt, times.front() / 20.0);

  SparseMatrix I(n, n);
  I.setIdentity();
  Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
  solver.setTolerance(spec.solver_tolerance);
  double factored_dt = -1.0, factored_theta = -1.0;
  SparseMatrix A;

  auto step = [&](double dt, double theta) {
    if (dt != factored_dt || theta != factored_theta) {
      A = I - (theta * dt) * L;
      solver.compute(A);
      factored_dt = dt;
      factored_theta = theta;
    }
    Eigen::VectorXd rhs = u + dt * g;
    if (theta < 1.0) rhs += ((1.0 - theta) * dt) * (L * u);
    Eigen::VectorXd next = solver.solveWithGuess(rhs, u);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "BiCGSTAB failed after " << solver.iterations() << " iterations (error "
         << solver.error() << ")";
      throw EvaluationError(os.str());
    }
    out.max_iterations = std::max(out.max_iterations, static_cast<int>(solver.iterations()));
    u = std::move(next);
    ++out.steps;
  };

  const double theta = stepping.scheme == TimeScheme::crank_nicolson ? 0.5 : 1.0;
  std::size_t global_step = 0;
  double t_prev = 0.0;
  for (double t_out : times) {
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((t_out - t_prev) / out.dt - 1e-9)));
    const double dt = (t_out - t_prev) / static_cast<double>(count);
    for (std::size_t s = 0; s < count; ++s, ++global_step) {
      if (theta < 1.0 && global_step < 2) {
        step(0.5 * dt, 1.0);
        step(0.5 * dt, 1.0);
      } else {
        step(dt, theta);
      }
    }
    out.times.push_back(t_out);
    out.states.push_back(u);
    t_prev = t_out;
  }
  return out;
}

}  // namespace

TemperatureField solve_ibvp_3d(const SurfaceChart& chart, double R, BoundaryValues values,
                               const GridSpec& grid, std::span<const double> times,
                               const TimeStepping& stepping, const ProjectionOptions& projection) {
  if (times.empty()) throw ConfigError("at least one output time is required");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev) || !std::isfinite(t))
      throw ConfigError("output times must be positive, finite and strictly increasing");
    prev = t;
  }
  if (!(R > 0.0) || !(grid.spacing > 0.0)) throw ConfigError("R and grid spacing must be positive");
  if (2.0 * R / grid.spacing < 8.0 - 1e-9) {
    std::ostringstream os;
    os << "unresolved geometry: 2R = " << 2.0 * R << " spans " << 2.0 * R / grid.spacing
       << " cells, at least 8 are required";
    throw ConfigError(os.str());
  }
  if (stepping.scheme == TimeScheme::explicit_euler)
    throw ConfigError("the 3-D solver is implicit only");

  Box box;
  if (grid.box) {
    const auto& b = *grid.box;
    box.lo = {b[0], b[1], b[2]};
    box.hi = {b[3], b[4], b[5]};
  } else {
    box = default_box(chart, R, grid.spacing, times.back(), grid.lateral_extent);
  }

  auto fine = std::make_shared<const GridRun>(
      run(chart, R, values, box, grid.spacing, times, stepping, grid, projection));
  std::shared_ptr<const GridRun> coarse;
  if (grid.estimate_error)
    coarse = std::make_shared<const GridRun>(
        run(chart, R, values, box, 2.0 * grid.spacing, times, stepping, grid, projection));

  auto eval = [fine, coarse](const Vec3& p, double t) {
    const double v = fine->value(p, t);
    return Estimate{v, coarse ? std::abs(v - coarse->value(p, t)) : 0.0, true};
  };
  const TemperatureField::Range range{std::min({0.0, values.plus, values.minus}),
                                      std::max({0.0, values.plus, values.minus})};
  std::ostringstream id;
  id << "grid-fd(" << chart.label() << ",R=" << R << ",h=" << grid.spacing << ")";
  TemperatureField f(id.str(), Provenance::grid_fd, range, eval);
  f.diagnostics["spacing"] = grid.spacing;
  f.diagnostics["nodes"] = static_cast<double>(fine->grid.nodes());
  f.diagnostics["unknowns"] = static_cast<double>(fine->grid.unknowns);
  f.diagnostics["unresolved_nodes"] = static_cast<double>(fine->grid.unresolved);
  f.diagnostics["dt"] = fine->dt;
  f.diagnostics["steps"] = static_cast<double>(fine->steps);
  f.diagnostics["max_solver_iterations"] = fine->max_iterations;
  f.diagnostics["solver_tolerance"] = grid.solver_tolerance;
  for (int a = 0; a < 3; ++a) {
    f.diagnostics[std::string("box_lo_") + "xyz"[a]] = fine->grid.box.lo[a];
    f.diagnostics[std::string("box_hi_") + "xyz"[a]] = fine->grid.box.hi[a];
  }
  return f;
}

}  // namespace isotherm
