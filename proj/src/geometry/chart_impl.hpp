#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isotherm/geometry.hpp"

namespace isotherm::detail {

/// One catalog kind, in local coordinates (no translation, natural
/// orientation). normal_sign() makes sign * (du x dv) point toward Omega_plus.
class ChartImpl {
 public:
  virtual ~ChartImpl() = default;

  virtual ChartDerivatives derivatives(ChartPoint uv) const = 0;
  virtual double normal_sign() const { return 1.0; }
  virtual std::optional<Projection> project(const Vec3&) const { return std::nullopt; }
  virtual std::vector<ChartPoint> hints(const Vec3&) const { return {}; }
  virtual std::string label() const = 0;
  virtual bool unbounded() const = 0;

  SurfaceKind kind{};
  SurfaceParams params;
  ParameterRect rect;
  std::vector<std::pair<ChartPoint, Vec3>> grid;
};

}  // namespace isotherm::detail
