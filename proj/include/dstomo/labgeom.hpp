#pragma once

#include <array>

#include "dstomo/sicsearch.hpp"

namespace dstomo {

/// Laboratory geometry in SI units (meters). z0 = 2 pi a^2 / lambda is the
/// Fresnel scale tying zeta to distance; z_det = zeta * z0 is the actual
/// slit-to-detector distance.
struct PhysicalGeometry {
  double lambda = 0.0;  // wavelength
  double a = 0.0;       // slit width (Gaussian standard deviation)
  double two_d = 0.0;   // slit center separation, 2 delta a
  double z_det = 0.0;   // detection-plane distance, zeta z0
  std::array<double, 4> x{};  // detector positions, xi_i a
  double z0 = 0.0;      // Fresnel scale k a^2
};

PhysicalGeometry to_physical(const TetraSolution& sol, double delta, double lambda, double a);

struct DimensionlessDesign {
  double delta = 0.0;
  double zeta = 0.0;
  std::array<double, 4> xi{};
};

/// Inverse of to_physical; the round trip is the identity to ~1e-12 relative.
DimensionlessDesign from_physical(const PhysicalGeometry& geom);

}  // namespace dstomo
