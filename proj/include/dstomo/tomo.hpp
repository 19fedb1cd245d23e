#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dstomo/linalg.hpp"
#include "dstomo/sicsearch.hpp"
#include "dstomo/wavefield.hpp"

namespace dstomo {

/// Photon tally: counts per detector window, photons outside every window,
/// and the total simulated. n[0]+n[1]+n[2]+n[3]+n_discarded == n_total.
struct CountRecord {
  std::array<std::uint64_t, 4> n{};
  std::uint64_t n_discarded = 0;
  std::uint64_t n_total = 0;

  std::uint64_t accepted() const { return n[0] + n[1] + n[2] + n[3]; }
};

enum class ReconstructionMethod { linear_inversion, mle };

struct ReconstructionReport {
  Vec3 r_hat{};
  ReconstructionMethod method = ReconstructionMethod::linear_inversion;
  bool projected = false;
  std::optional<double> fidelity;        // versus the true state when known
  std::optional<double> trace_distance;  // versus the true state when known
  std::optional<double> acceptance_fraction;
};

/// Outcome probabilities p_i = c_i (1 + s_i.r) / 2. For a balanced
/// tetrahedron this is (1 + s_i.r)/4 and the four values sum to 1.
std::array<double, 4> ideal_probabilities(const BlochState& rho, const Povm4& povm);

/// Inverse-CDF sampler for the detection density on the layout's plane.
/// The cumulative is tabulated on the wavefield default grid (per-cell
/// Simpson) and inverted with a guide table plus linear interpolation.
/// Draws are organized in fixed-size, independently seeded blocks so the
/// stream for (seed, n) does not depend on how work is split.
class PositionSampler {
 public:
  PositionSampler(const BlochState& rho, const DetectorLayout& layout, double grid_spacing = 0.005);

  double sample_one(std::mt19937_64& engine) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  /// Map a uniform variate in [0,1) through the tabulated inverse CDF.
  double transform(double u) const {
    const double target = u * total_mass_;
    std::size_t j = guide_[static_cast<std::size_t>(u * guide_scale_)];
    while (j + 2 < grid_.n && cdf_[j + 1] < target) ++j;
    const double mass = cdf_[j + 1] - cdf_[j];
    double frac = mass > 0.0 ? (target - cdf_[j]) / mass : 0.5;
    frac = frac < 0.0 ? 0.0 : (frac > 1.0 ? 1.0 : frac);
    return grid_.lo + (static_cast<double>(j) + frac) * grid_.spacing;
  }

  /// Probability that a draw lands in window i, by Simpson quadrature of the
  /// exact density (not the table).
  double window_probability(int i) const;
  double acceptance_probability() const;

  static constexpr std::size_t kBlockSize = 1 << 16;

 private:
  std::vector<double> cdf_;    // cumulative mass at cell boundaries
  std::vector<std::uint32_t> guide_;
  Grid grid_{};
  double total_mass_ = 0.0;
  double guide_scale_ = 0.0;
  std::array<double, 4> window_prob_{};
};

/// n draws from the detection density at the layout's plane, deterministic
/// given the seed.
std::vector<double> sample_positions(const BlochState& rho, const DetectorLayout& layout,
                                     std::size_t n, std::uint64_t seed);

/// Tally positions into the four windows [xi_i - dxi, xi_i + dxi].
/// Windows must be pairwise disjoint.
CountRecord bin_counts(const std::vector<double>& positions, const DetectorLayout& layout);

/// bin_counts(sample_positions(...)) without materializing the positions.
CountRecord simulate_counts(const BlochState& rho, const DetectorLayout& layout,
                            std::uint64_t n_total, std::uint64_t seed);

/// Extend one sampling stream until each accepted-count target is reached
/// (targets ascending); returns the tally snapshot at each crossing.
/// Stops early at max_total draws.
std::vector<CountRecord> simulate_to_accepted(const BlochState& rho, const DetectorLayout& layout,
                                              const std::vector<std::uint64_t>& targets,
                                              std::uint64_t seed,
                                              std::uint64_t max_total = UINT64_MAX);

struct LinearInversion {
  Vec3 r_hat{};
  bool rank_deficient = false;
  std::vector<Vec3> noninformative;  // directions the measurement cannot see
};

/// Solve p_i = c_i (1 + s_i.r)/2 for r in least squares (pseudoinverse of
/// the 4x3 system). Exact on exact probabilities; reduces to r = 3 sum p_i s_i
/// for a balanced tetrahedron. With artificial_balance the counts are first
/// rescaled by (1/2)/c_i and the ideal-frame formula is applied.
LinearInversion linear_invert(const std::array<double, 4>& p_hat, const Povm4& povm,
                              bool artificial_balance = false);

struct ProjectedState {
  BlochState state{};
  bool projected = false;
};

/// Rescale |r| > 1 onto the Bloch sphere; interior vectors pass unchanged.
ProjectedState project_physical(const Vec3& r_hat);

struct MleOptions {
  int max_iters = 5000;
  double tol = 1e-12;  // stop when the log-likelihood gain drops below tol
};

/// Iterative maximum-likelihood estimate: rho <- N R(rho) rho R(rho) with
/// R = sum_i (f_i / Tr(E_i rho)) E_i, started from the maximally mixed state.
/// The returned state is physical by construction. An optional trace records
/// the per-iteration log-likelihood.
BlochState mle_reconstruct(const CountRecord& counts, const Povm4& povm, const MleOptions& opts = {},
                           std::vector<double>* likelihood_trace = nullptr);
BlochState mle_reconstruct(const std::array<double, 4>& frequencies, const Povm4& povm,
                           const MleOptions& opts = {},
                           std::vector<double>* likelihood_trace = nullptr);

/// Qubit closed forms: F = (1 + ra.rb + sqrt((1-|ra|^2)(1-|rb|^2)))/2,
/// D = |ra - rb|/2.
double fidelity(const BlochState& a, const BlochState& b);
double trace_distance(const BlochState& a, const BlochState& b);

/// Bloch vectors uniform in the ball (mixed) and on the sphere (pure).
BlochState random_mixed_state(std::mt19937_64& engine);
BlochState random_pure_state(std::mt19937_64& engine);

}  // namespace dstomo
