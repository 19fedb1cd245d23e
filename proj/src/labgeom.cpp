#include "dstomo/labgeom.hpp"

#include <cmath>
#include <stdexcept>

namespace dstomo {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

PhysicalGeometry to_physical(const TetraSolution& sol, double delta, double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 0.0))
    throw std::invalid_argument("wavelength and slit width must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");

  PhysicalGeometry g;
  g.lambda = lambda;
  g.a = a;
  g.z0 = kTwoPi * a * a / lambda;
  g.two_d = 2.0 * delta * a;
  g.z_det = sol.zeta * g.z0;
  const auto xi = detector_positions(sol, delta);
  for (int i = 0; i < 4; ++i)
    g.x[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)] * a;
  return g;
}

DimensionlessDesign from_physical(const PhysicalGeometry& geom) {
  if (!(geom.lambda > 0.0) || !(geom.a > 0.0) || !(geom.two_d > 0.0) || !(geom.z_det > 0.0))
    throw std::invalid_argument("geometry lengths must be positive");

  DimensionlessDesign d;
  d.delta = geom.two_d / (2.0 * geom.a);
  d.zeta = geom.z_det * geom.lambda / (kTwoPi * geom.a * geom.a);
  for (int i = 0; i < 4; ++i)
    d.xi[static_cast<std::size_t>(i)] = geom.x[static_cast<std::size_t>(i)] / geom.a;
  return d;
}

}  // namespace dstomo
