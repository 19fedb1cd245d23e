#pragma once

#include <optional>

#include "dstomo/sicsearch.hpp"

namespace dstomo {

/// A complete single-plane measurement design: tetrahedron solution, slit
/// half-separation and detector half-width. Everything else (layout, POVM,
/// physical geometry) derives from these.
struct Design {
  TetraSolution solution{};
  double delta = 1.0;
  double delta_xi = 1e-3;
};

inline DetectorLayout layout_of(const Design& d) {
  return make_layout(d.solution, d.delta, d.delta_xi);
}

inline Povm4 povm_of(const Design& d) { return build_povm(d.solution, d.delta, d.delta_xi); }

/// The balanced design at the smallest detection plane (zeta ~ 3.4678,
/// delta ~ 2.76444), refined to machine precision. Deterministic.
Design reference_design(double delta_xi = 1e-3);

/// Solution record for catalogs: balancing and positions attached when the
/// solution is reflection-symmetric.
struct SolutionRecord {
  TetraSolution solution{};
  std::optional<double> delta_balanced;
  std::optional<std::array<double, 4>> xi;
  double gram_max_err = 0.0;
};

SolutionRecord annotate(const TetraSolution& sol);

}  // namespace dstomo
