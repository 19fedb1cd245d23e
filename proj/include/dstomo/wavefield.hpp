#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "dstomo/linalg.hpp"

namespace dstomo {

/// Double-slit geometry in slit-width units: the slit centers sit at -delta
/// and +delta, so the physical separation is 2*delta*a.
struct SlitConfig {
  double delta = 1.0;
};

/// Point on a transverse plane, xi = x/a and zeta = z/z0 with z0 = k a^2.
struct PlanePoint {
  double xi = 0.0;
  double zeta = 0.0;
};

/// Qubit state as a Bloch vector, rho = (I + r.sigma)/2 in the slit-mode
/// basis {psi1, psi2}.
struct BlochState {
  Vec3 r{};

  bool is_physical(double tol = 1e-9) const { return dot(r, r) <= (1.0 + tol) * (1.0 + tol); }
};

/// Uniform grid of transverse samples, xi_i = lo + i*spacing.
struct Grid {
  double lo = 0.0;
  double spacing = 1.0;
  std::size_t n = 0;

  double xi(std::size_t i) const { return lo + static_cast<double>(i) * spacing; }
  double hi() const { return xi(n - 1); }
};

/// Complex field sampled on a uniform grid. Immutable after construction.
struct SampledField {
  Grid grid{};
  std::vector<std::complex<double>> values{};
};

/// Grid wide enough that a propagated slit mode is below ~1e-10 truncation:
/// [-8 sqrt((1+zeta^2)/2) - delta, +8 sqrt((1+zeta^2)/2) + delta].
Grid default_grid(double zeta, const SlitConfig& cfg, double spacing = 0.005);

SampledField make_field(const Grid& grid, const std::function<std::complex<double>(double)>& f);

/// Trapezoid integral of |field|^2 over its grid.
double field_norm_squared(const SampledField& field);

/// Slit mode k in {1,2} at the slit plane: pi^(-1/4) exp(-(xi -+ delta)^2/2).
/// Purely real and positive.
double slit_mode(int k, double xi, const SlitConfig& cfg);

/// Closed-form free propagation of slit mode k to plane zeta >= 0.
std::complex<double> propagate_mode(int k, const PlanePoint& p, const SlitConfig& cfg);

/// <psi1|psi2> = exp(-delta^2), independent of zeta.
double mode_overlap(const SlitConfig& cfg);

/// Numerical Fresnel propagation of a sampled field by trapezoid quadrature
/// of the paraxial kernel exp(i(xi-xi')^2/(2 zeta))/sqrt(2 pi i zeta),
/// evaluated on `out`. Independent oracle for propagate_mode.
SampledField fresnel_propagate(const SampledField& in, double zeta, const Grid& out);

/// zeta == 0 returns the input unchanged; otherwise propagates onto a grid
/// widened by sqrt(1+zeta^2) at the same spacing.
SampledField fresnel_propagate(const SampledField& in, double zeta);

/// Quadrature error estimate by comparing against the half-resolution rule.
double fresnel_error_estimate(const SampledField& in, double zeta, const Grid& out);

/// Intensity envelope I(xi,zeta) = |psi1|^2 + |psi2|^2; the maximum detection
/// probability density over all input states.
double intensity_envelope(const PlanePoint& p, const SlitConfig& cfg);

/// w = 2 xi delta / (1 + zeta^2), the variable the projector depends on.
double w_of(double xi, double zeta, const SlitConfig& cfg);

/// Measurement Bloch vector s = sech(w) (cos(w zeta), sin(w zeta), -sinh(w)).
/// Unit length for all (w, zeta); finite for |w| up to ~700.
Vec3 bloch_of_w(double w, double zeta);

/// Rank-1 projector onto |psi(xi,zeta)>, entries e^(-+w)/(2 cosh w) and
/// sech(w) e^(-+ i w zeta)/2, computed in overflow-safe form.
Mat2 projector_of(const PlanePoint& p, const SlitConfig& cfg);

/// Detection probability density p(xi,zeta) = I(xi,zeta) Tr(Pi rho).
/// Bounded by the intensity envelope; integrates to 1 + r_x exp(-delta^2)
/// over xi (exactly 1 up to the slit-mode overlap).
double detection_pdf(const BlochState& rho, const PlanePoint& p, const SlitConfig& cfg);

}  // namespace dstomo
