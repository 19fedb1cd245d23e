#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dstomo/linalg.hpp"
#include "dstomo/wavefield.hpp"

namespace dstomo {

/// Candidate single-plane tetrahedron configuration: detection plane, the
/// four w-values (ascending), and the objective value at the point.
struct TetraSolution {
  double zeta = 0.0;
  std::array<double, 4> w{};
  double residual = 0.0;
};

struct PovmElement {
  double weight = 0.0;  // c_i > 0, sum c_i = 2
  Vec3 s{};             // unit Bloch vector
};

/// Four weighted rank-1 elements c_i (I + s_i.sigma)/2 / 2 with the Frobenius
/// norm of their sum minus the identity.
struct Povm4 {
  std::array<PovmElement, 4> elements{};
  double closure_residual = 0.0;
};

/// Detector plane, four window centers, window half-width and slit
/// half-separation, all dimensionless.
struct DetectorLayout {
  double zeta0 = 0.0;
  std::array<double, 4> xi{};
  double delta_xi = 1e-3;
  double delta = 1.0;
};

/// f(zeta, w) = sum_{i>j} (s_i.s_j + 1/3)^2; zero iff the four measurement
/// Bloch vectors form a regular tetrahedron.
double tetra_objective(double zeta, const std::array<double, 4>& w);

/// Analytic gradient of tetra_objective with respect to (zeta, w1..w4).
std::array<double, 5> objective_gradient(double zeta, const std::array<double, 4>& w);

struct RefineOptions {
  double tol = 1e-12;       // accept when f < tol
  double grad_tol = 1e-9;   // stop when |grad f| < grad_tol
  int max_iters = 10000;
};

/// Local refinement of a starting point by damped least-squares descent on
/// the six pair residuals. Returns the refined point whether or not it
/// reached tol; callers filter on residual.
TetraSolution refine_solution(double zeta, const std::array<double, 4>& w,
                              const RefineOptions& opts = {});

struct SearchOptions {
  double zeta_min = 0.0;       // exclusive
  double zeta_max = 11.0;      // inclusive
  int n_starts = 20000;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  double w_box = 3.0;          // starts drawn from w_i in [-w_box, w_box]
  double dedup_tol = 1e-4;     // max-abs metric over (zeta, canonical w)
  RefineOptions refine{};
};

/// Multistart search: random starts, local refinement, canonicalization,
/// deduplication, sort by zeta. Deterministic given the seed.
std::vector<TetraSolution> search_tetrahedra(const SearchOptions& opts);

/// w sorted ascending; of the solution and its reflection (-w4,-w3,-w2,-w1)
/// keep the lexicographically smaller quadruple. Idempotent.
TetraSolution canonicalize(const TetraSolution& sol);

/// Merge solutions equal within tol in the (zeta, canonical w) max-abs
/// metric, keeping the smaller residual. Output sorted by zeta.
std::vector<TetraSolution> dedup_solutions(std::vector<TetraSolution> sols, double tol = 1e-4);

/// True when w is reflection-symmetric: w1 = -w4 and w2 = -w3 within tol.
bool is_reflection_symmetric(const TetraSolution& sol, double tol = 1e-6);

/// Slit half-separation that equalizes the intensity envelope at the four
/// detectors of a symmetric solution:
/// delta = sqrt((1+zeta^2)(w1^2-w2^2)/(ln cosh w1 - ln cosh w2))/2, w1<w2<0.
double balanced_delta(double zeta, double w1, double w2);

/// xi_i = w_i (1 + zeta^2) / (2 delta), same order as w.
std::array<double, 4> detector_positions(const TetraSolution& sol, double delta);

DetectorLayout make_layout(const TetraSolution& sol, double delta, double delta_xi = 1e-3);

/// Assemble the four-outcome measurement at the solution's w-values with
/// detectors repositioned for the given delta. Weights are
/// c_i = I(xi_i) dxi / Sigma with Sigma = sum_i I(xi_i) dxi / 2, so they
/// always sum to 2 (the trace of the identity).
Povm4 build_povm(const TetraSolution& sol, double delta, double delta_xi = 1e-3);

/// Largest entrywise deviation of the Gram matrix s_i.s_j from
/// (4/3) delta_ij - 1/3.
double gram_max_error(const TetraSolution& sol);

}  // namespace dstomo
