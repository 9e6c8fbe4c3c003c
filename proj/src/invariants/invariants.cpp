#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/invariants.hpp"

namespace isotherm {

namespace {

struct Products {
  double minus;  // prod(1 - R k_j)
  double plus;   // prod(1 + R k_j)
};

Products products(const CurvaturePair& pair, double R) {
  const Products p{(1.0 - R * pair.k1()) * (1.0 - R * pair.k2()),
                   (1.0 + R * pair.k1()) * (1.0 + R * pair.k2())};
  if (p.minus < 0.0 || p.plus < 0.0 || !std::isfinite(p.minus) || !std::isfinite(p.plus)) {
    std::ostringstream os;
    os << "negative curvature product for k = (" << pair.k1() << ", " << pair.k2()
       << "), R = " << R;
    throw DomainError(os.str());
  }
  return p;
}

}  // namespace

double phi_sum(const CurvaturePair& pair, double R) {
  const Products p = products(pair, R);
  return std::sqrt(p.minus) + std::sqrt(p.plus);
}

double phi_diff(const CurvaturePair& pair, double R) {
  const Products p = products(pair, R);
  return std::sqrt(p.minus) - std::sqrt(p.plus);
}

double phi_sum_two_point(const CurvaturePair& pair, double R) {
  const OffsetCurvatures off = offset_curvatures(pair, R);
  auto term = [R](const CurvaturePair& k) {
    return 1.0 / std::sqrt((1.0 - R * k.k1()) * (1.0 - R * k.k2()));
  };
  return term(off.plus) + term(off.minus);
}

double amgm_certificate(const CurvaturePair& pair, double R) { return 2.0 - phi_sum(pair, R); }

double product_identity_check(const CurvaturePair& pair, double R) {
  return phi_diff(pair, R) * phi_sum(pair, R) + 4.0 * R * pair.mean();
}

UmbilicScan umbilic_scan(const SurfaceChart& chart, const SampleRegion& region, double tolerance) {
  UmbilicScan scan;
  scan.inf_gap = std::numeric_limits<double>::infinity();
  for (const ChartPoint uv : region.points()) {
    const CurvaturePair k = principal_curvatures(chart, uv);
    ++scan.samples;
    if (k.umbilicity_gap() < tolerance) scan.umbilics.push_back(uv);
    if (k.umbilicity_gap() < scan.inf_gap) {
      scan.inf_gap = k.umbilicity_gap();
      scan.inf_at = uv;
    }
  }
  if (!chart.unbounded()) return scan;

  const auto& rect = chart.rect();
  const double cu = 0.5 * (rect.u_min + rect.u_max), cv = 0.5 * (rect.v_min + rect.v_max);
  constexpr int angles = 32;
  for (int k = 0; k <= 16; ++k) {
    const double radius = std::ldexp(1.0, k);
    WitnessStep best;
    best.radius = radius;
    double gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < angles; ++a) {
      const double phi = 2.0 * std::numbers::pi * a / angles;
      const ChartPoint uv{cu + radius * std::cos(phi), cv + radius * std::sin(phi)};
      try {
        const CurvaturePair pair = principal_curvatures(chart, uv);
        if (pair.umbilicity_gap() < gap) {
          gap = pair.umbilicity_gap();
          best.uv = uv;
          best.pair = pair;
        }
      } catch (const EvaluationError&) {
      }
    }
    if (std::isfinite(gap)) scan.witness_sequence.push_back(best);
  }
  const auto& seq = scan.witness_sequence;
  if (seq.size() >= 4) {
    bool decreasing = true;
    for (std::size_t i = seq.size() - 3; i < seq.size(); ++i)
      decreasing = decreasing && seq[i].pair.umbilicity_gap() <= seq[i - 1].pair.umbilicity_gap();
    const CurvaturePair& last = seq.back().pair;
    const CurvaturePair& prev = seq[seq.size() - 2].pair;
    const bool settled =
        std::abs(last.k1() - prev.k1()) < 1e-3 && std::abs(last.k2() - prev.k2()) < 1e-3;
    scan.witness = decreasing && settled && last.umbilicity_gap() < tolerance;
  }
  return scan;
}

MeanCurvatureRange mean_curvature_sign_report(const SurfaceChart& chart,
                                              const SampleRegion& region) {
  MeanCurvatureRange r;
  r.inf_H = std::numeric_limits<double>::infinity();
  r.sup_H = -std::numeric_limits<double>::infinity();
  r.inf_abs_H = std::numeric_limits<double>::infinity();
  for (const ChartPoint uv : region.points()) {
    const double H = principal_curvatures(chart, uv).mean();
    r.inf_H = std::min(r.inf_H, H);
    r.sup_H = std::max(r.sup_H, H);
    r.inf_abs_H = std::min(r.inf_abs_H, std::abs(H));
    ++r.samples;
  }
  return r;
}

std::string to_string(InvariantKind which) { return which == InvariantKind::sum ? "sum" : "diff"; }

InvariantKind parse_invariant(const std::string& name) {
  if (name == "sum") return InvariantKind::sum;
  if (name == "diff") return InvariantKind::diff;
  throw ConfigError("unknown invariant '" + name + "' (expected sum or diff)");
}

std::string to_string(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::totally_umbilical: return "totally_umbilical";
    case VerdictTag::plane_or_sphere: return "plane_or_sphere";
    case VerdictTag::minimal_c_zero: return "minimal_c_zero";
    case VerdictTag::sign_definite_H: return "sign_definite_H";
    case VerdictTag::constant_no_umbilic: return "constant_no_umbilic";
    case VerdictTag::inconsistent: return "inconsistent";
    case VerdictTag::inconclusive: return "inconclusive";
  }
  return "unknown";
}

bool Verdict::has(VerdictTag tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

InvariantStats invariant_stats(const std::vector<double>& values) {
  InvariantStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    ss += (v - s.mean) * (v - s.mean);
    s.max_deviation = std::max(s.max_deviation, std::abs(v - s.mean));
  }
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  s.relative_std = s.std / std::max(std::abs(s.mean), 1.0);
  return s;
}

InvariantReport constancy_report(const SurfaceChart& chart, const SampleRegion& region, double R,
                                 InvariantKind which, const ConstancyThresholds& thresholds) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  InvariantReport report;
  report.surface = chart.label();
  report.R = R;
  report.which = which;
  report.thresholds = thresholds;

  std::vector<double> sums, diffs;
  for (const ChartPoint uv : region.points()) {
    const CurvaturePair pair = principal_curvatures(chart, uv);
    if (!(R * pair.max_abs() < 1.0)) {
      std::ostringstream os;
      os << "curvature bound fails at (" << uv.u << ", " << uv.v << ") on " << chart.label()
         << ": R*max|k| = " << R * pair.max_abs();
      throw DomainError(os.str());
    }
    InvariantSample s{uv, pair, phi_sum(pair, R), phi_diff(pair, R)};
    sums.push_back(s.phi_sum);
    diffs.push_back(s.phi_diff);
    report.samples.push_back(s);
  }
  report.sum = invariant_stats(sums);
  report.diff = invariant_stats(diffs);

  Verdict& v = report.verdict;
  const MeanCurvatureRange H = mean_curvature_sign_report(chart, region);
  const UmbilicScan umb = umbilic_scan(chart, region, thresholds.umbilic);
  v.inf_H = H.inf_H;
  v.sup_H = H.sup_H;
  v.inf_abs_H = H.inf_abs_H;
  v.inf_gap = umb.inf_gap;
  v.witness = umb.witness;

  const InvariantStats& st = which == InvariantKind::sum ? report.sum : report.diff;
  v.c = st.mean;
  v.constant = st.relative_std < thresholds.relative_std;

  if (report.samples.size() < thresholds.min_samples) {
    v.tags.push_back(VerdictTag::inconclusive);
    v.note = "fewer than " + std::to_string(thresholds.min_samples) + " admissible samples";
    return report;
  }
  if (!v.constant) {
    v.tags.push_back(VerdictTag::inconsistent);
    v.note = "invariant varies over the samples, so the surface is not stationary isothermic";
    return report;
  }

  const double eq = thresholds.equality;
  if (which == InvariantKind::sum) {
    if (std::abs(v.c - 2.0) < eq) {
      v.tags = {VerdictTag::totally_umbilical, VerdictTag::plane_or_sphere};
      v.note = "c = 2 is the equality case of AM-GM: every point is umbilic";
    } else if (!umb.umbilics.empty() || umb.witness) {
      v.tags.push_back(VerdictTag::inconsistent);
      v.note = "c < 2 with an umbilic point or an escaping umbilic sequence, which forces c = 2";
    } else {
      v.tags.push_back(VerdictTag::constant_no_umbilic);
      v.note = "constant c < 2 without umbilics: the classification hypotheses do not apply";
    }
    return report;
  }

  const bool minimal = std::max(std::abs(v.inf_H), std::abs(v.sup_H)) < eq;
  if (std::abs(v.c) < eq) {
    if (minimal) {
      v.tags.push_back(VerdictTag::minimal_c_zero);
      v.note = "c = 0 and H = 0: minimal surface";
    } else {
      v.tags.push_back(VerdictTag::inconsistent);
      v.note = "c = 0 but H does not vanish";
    }
    return report;
  }
  // phi_diff * phi_sum = -4RH with phi_sum > 0, so H has the sign of -c
  const bool sign_ok = v.c > 0.0 ? v.sup_H < 0.0 : v.inf_H > 0.0;
  if (sign_ok) {
    v.tags.push_back(VerdictTag::sign_definite_H);
    v.note = "c != 0: H keeps one sign with inf |H| = " + std::to_string(v.inf_abs_H);
  } else {
    v.tags.push_back(VerdictTag::inconsistent);
    v.note = "c != 0 but H changes sign or has the wrong sign";
  }
  return report;
}

}  // namespace isotherm
