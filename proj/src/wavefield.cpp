#include "dstomo/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dstomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double slit_center(int k, const SlitConfig& cfg) {
  if (k != 1 && k != 2) throw std::invalid_argument("slit index must be 1 or 2");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("slit half-separation must be positive");
  return (k == 1) ? -cfg.delta : cfg.delta;
}

/// sech(w) = 2 e^{-|w|} / (1 + e^{-2|w|}), finite for |w| up to ~700.
double sech(double w) {
  const double e = std::exp(-std::abs(w));
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

Grid default_grid(double zeta, const SlitConfig& cfg, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const double half = 8.0 * std::sqrt(0.5 * (1.0 + zeta * zeta)) + cfg.delta;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / spacing)) + 1;
  return Grid{-half, spacing, n};
}

SampledField make_field(const Grid& grid, const std::function<std::complex<double>(double)>& f) {
  SampledField out{grid, {}};
  out.values.reserve(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) out.values.push_back(f(grid.xi(i)));
  return out;
}

double field_norm_squared(const SampledField& field) {
  double s = 0.0;
  for (std::size_t i = 0; i < field.grid.n; ++i) {
    const double v = std::norm(field.values[i]);
    s += (i == 0 || i + 1 == field.grid.n) ? 0.5 * v : v;
  }
  return s * field.grid.spacing;
}

double slit_mode(int k, double xi, const SlitConfig& cfg) {
  const double u = xi - slit_center(k, cfg);
  return std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
}

std::complex<double> propagate_mode(int k, const PlanePoint& p, const SlitConfig& cfg) {
  const double u = p.xi - slit_center(k, cfg);
  if (p.zeta < 0.0) throw std::invalid_argument("zeta must be nonnegative");
  const double denom = 1.0 + p.zeta * p.zeta;
  const std::complex<double> arg =
      -std::complex<double>(1.0, -p.zeta) * (u * u) / (2.0 * denom);
  // Principal branch of sqrt(1 + i zeta); validated against the quadrature
  // oracle in the tests.
  const std::complex<double> root =
      std::sqrt(std::sqrt(kPi) * std::complex<double>(1.0, p.zeta));
  return std::exp(arg) / root;
}

double mode_overlap(const SlitConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("slit half-separation must be positive");
  return std::exp(-cfg.delta * cfg.delta);
}

namespace {

SampledField fresnel_quadrature(const SampledField& in, double zeta, const Grid& out,
                                std::size_t stride) {
  const double h = in.grid.spacing * static_cast<double>(stride);
  const std::complex<double> root = std::sqrt(std::complex<double>(0.0, 2.0 * kPi * zeta));
  // Trapezoid weights; the sampled chirp is far below the grid's Nyquist
  // rate (checked below), so the rule is limited by endpoint truncation.
  std::vector<std::complex<double>> weighted;
  std::vector<double> xin;
  for (std::size_t j = 0; j < in.grid.n; j += stride) {
    weighted.push_back(in.values[j] * h);
    xin.push_back(in.grid.xi(j));
  }
  if (weighted.size() < 3) throw std::invalid_argument("input field has too few samples");
  weighted.front() *= 0.5;
  weighted.back() *= 0.5;

  const double band =
      std::max(std::abs(out.hi() - xin.front()), std::abs(xin.back() - out.lo)) / zeta + 8.0;
  if (h * band > 0.5 * kPi) {
    const double est = std::pow(h * band / kPi, 2.0);
    throw std::invalid_argument(
        "grid too coarse for the propagation kernel (estimated quadrature error ~" +
        std::to_string(est) + "); refine the spacing");
  }

  SampledField result{out, std::vector<std::complex<double>>(out.n)};
  for (std::size_t i = 0; i < out.n; ++i) {
    const double x = out.xi(i);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < weighted.size(); ++j) {
      const double d = x - xin[j];
      acc += std::polar(1.0, d * d / (2.0 * zeta)) * weighted[j];
    }
    result.values[i] = acc / root;
  }
  return result;
}

}  // namespace

SampledField fresnel_propagate(const SampledField& in, double zeta, const Grid& out) {
  if (zeta < 0.0) throw std::invalid_argument("zeta must be nonnegative");
  if (zeta == 0.0) return in;
  return fresnel_quadrature(in, zeta, out, 1);
}

SampledField fresnel_propagate(const SampledField& in, double zeta) {
  if (zeta < 0.0) throw std::invalid_argument("zeta must be nonnegative");
  if (zeta == 0.0) return in;
  const double spread = std::sqrt(1.0 + zeta * zeta);
  const double mid = 0.5 * (in.grid.lo + in.grid.hi());
  const double half = 0.5 * (in.grid.hi() - in.grid.lo) * spread;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / in.grid.spacing)) + 1;
  return fresnel_quadrature(in, zeta, Grid{mid - half, in.grid.spacing, n}, 1);
}

double fresnel_error_estimate(const SampledField& in, double zeta, const Grid& out) {
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  const SampledField fine = fresnel_quadrature(in, zeta, out, 1);
  const SampledField coarse = fresnel_quadrature(in, zeta, out, 2);
  double err = 0.0;
  for (std::size_t i = 0; i < out.n; ++i)
    err = std::max(err, std::abs(fine.values[i] - coarse.values[i]));
  return err;
}

double intensity_envelope(const PlanePoint& p, const SlitConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("slit half-separation must be positive");
  if (p.zeta < 0.0) throw std::invalid_argument("zeta must be nonnegative");
  const double s = 1.0 + p.zeta * p.zeta;
  // 2 exp(-(xi^2+delta^2)/s) cosh(2 delta xi / s) expanded into the two
  // displaced Gaussians, which cannot overflow.
  const double um = p.xi - cfg.delta;
  const double up = p.xi + cfg.delta;
  return (std::exp(-um * um / s) + std::exp(-up * up / s)) / std::sqrt(kPi * s);
}

double w_of(double xi, double zeta, const SlitConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("slit half-separation must be positive");
  return 2.0 * xi * cfg.delta / (1.0 + zeta * zeta);
}

Vec3 bloch_of_w(double w, double zeta) {
  const double c = sech(w);
  const double theta = w * zeta;
  return {c * std::cos(theta), c * std::sin(theta), -std::tanh(w)};
}

Mat2 projector_of(const PlanePoint& p, const SlitConfig& cfg) {
  if (p.zeta < 0.0) throw std::invalid_argument("zeta must be nonnegative");
  const double w = w_of(p.xi, p.zeta, cfg);
  const double t = std::tanh(w);  // e^{-+w}/cosh w == 1 -+ tanh w
  const double offmag = 0.5 * sech(w);
  const double theta = w * p.zeta;
  Mat2 pi;
  pi(0, 0) = 0.5 * (1.0 - t);
  pi(0, 1) = offmag * std::polar(1.0, -theta);
  pi(1, 0) = offmag * std::polar(1.0, theta);
  pi(1, 1) = 0.5 * (1.0 + t);
  return pi;
}

double detection_pdf(const BlochState& rho, const PlanePoint& p, const SlitConfig& cfg) {
  if (!rho.is_physical()) throw std::invalid_argument("Bloch vector exceeds unit length");
  const Mat2 pi = projector_of(p, cfg);
  const double population = (pi * Mat2::from_bloch(rho.r)).trace().real();
  return intensity_envelope(p, cfg) * std::max(population, 0.0);
}

}  // namespace dstomo
