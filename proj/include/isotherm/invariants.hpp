#pragma once

#include <string>
#include <vector>

#include "isotherm/geometry.hpp"

namespace isotherm {

/// sqrt(prod(1 - R k_j)) + sqrt(prod(1 + R k_j)). Throws DomainError when a
/// product is negative.
double phi_sum(const CurvaturePair& pair, double R);
/// sqrt(prod(1 - R k_j)) - sqrt(prod(1 + R k_j)).
double phi_diff(const CurvaturePair& pair, double R);
/// The sum written through the foot points: prod(1 - R k+_j)^{-1/2} +
/// prod(1 - R k-_j)^{-1/2} with the offset curvatures of the pair.
double phi_sum_two_point(const CurvaturePair& pair, double R);

/// 2 - phi_sum; nonnegative, zero exactly at umbilics.
double amgm_certificate(const CurvaturePair& pair, double R);
/// phi_diff * phi_sum + 4 R H; vanishes identically.
double product_identity_check(const CurvaturePair& pair, double R);

struct WitnessStep {
  double radius = 0.0;  ///< distance from the rectangle centre in chart coordinates
  ChartPoint uv;
  CurvaturePair pair;
};

struct UmbilicScan {
  std::vector<ChartPoint> umbilics;
  double inf_gap = 0.0;
  ChartPoint inf_at;
  std::size_t samples = 0;
  /// A boundary-escaping sequence along which k1 - k2 -> 0 and both
  /// curvatures settle on a common finite value.
  bool witness = false;
  std::vector<WitnessStep> witness_sequence;
};

/// Samples the region for |k1 - k2| < tolerance. On unbounded charts it also
/// follows parameter circles of radius 2^k around the rectangle centre,
/// keeping the smallest gap on each.
UmbilicScan umbilic_scan(const SurfaceChart& chart, const SampleRegion& region,
                         double tolerance = 1e-6);

struct MeanCurvatureRange {
  double inf_H = 0.0;
  double sup_H = 0.0;
  double inf_abs_H = 0.0;
  std::size_t samples = 0;
};

MeanCurvatureRange mean_curvature_sign_report(const SurfaceChart& chart,
                                              const SampleRegion& region);

enum class InvariantKind { sum, diff };

std::string to_string(InvariantKind which);
InvariantKind parse_invariant(const std::string& name);

enum class VerdictTag {
  totally_umbilical,
  plane_or_sphere,
  minimal_c_zero,
  sign_definite_H,
  constant_no_umbilic,
  inconsistent,
  inconclusive,
};

std::string to_string(VerdictTag tag);

struct InvariantSample {
  ChartPoint uv;
  CurvaturePair pair;
  double phi_sum = 0.0;
  double phi_diff = 0.0;
};

struct InvariantStats {
  double mean = 0.0;
  double std = 0.0;
  double max_deviation = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// std / max(|mean|, 1), compared against the constancy threshold
  double relative_std = 0.0;
};

InvariantStats invariant_stats(const std::vector<double>& values);

struct Verdict {
  std::vector<VerdictTag> tags;
  bool constant = false;
  double c = 0.0;  ///< mean of the tested invariant
  double inf_H = 0.0, sup_H = 0.0, inf_abs_H = 0.0;
  double inf_gap = 0.0;
  bool witness = false;
  std::string note;

  bool has(VerdictTag tag) const;
};

struct ConstancyThresholds {
  double relative_std = 1e-8;
  double equality = 1e-8;  ///< for c = 2, c = 0 and H = 0
  double umbilic = 1e-6;
  std::size_t min_samples = 100;
};

struct InvariantReport {
  std::string surface;
  double R = 0.0;
  InvariantKind which = InvariantKind::sum;
  ConstancyThresholds thresholds;
  std::vector<InvariantSample> samples;
  InvariantStats sum;
  InvariantStats diff;
  Verdict verdict;
};

/// Evaluates both invariants over the region and applies the case analysis
/// for the chosen one. Throws DomainError when the curvature bound fails.
InvariantReport constancy_report(const SurfaceChart& chart, const SampleRegion& region, double R,
                                 InvariantKind which, const ConstancyThresholds& thresholds = {});

}  // namespace isotherm
