#include "dstomo/design.hpp"

namespace dstomo {

Design reference_design(double delta_xi) {
  RefineOptions ro;
  ro.tol = 1e-28;
  ro.grad_tol = 1e-16;
  ro.max_iters = 500;
  TetraSolution sol =
      canonicalize(refine_solution(3.4678, {-1.0287, -0.268044, 0.268044, 1.0287}, ro));
  const double delta = balanced_delta(sol.zeta, sol.w[0], sol.w[1]);
  return Design{sol, delta, delta_xi};
}

SolutionRecord annotate(const TetraSolution& sol) {
  SolutionRecord rec;
  rec.solution = canonicalize(sol);
  rec.gram_max_err = gram_max_error(rec.solution);
  if (is_reflection_symmetric(rec.solution) && rec.solution.w[1] < 0.0) {
    rec.delta_balanced = balanced_delta(rec.solution.zeta, rec.solution.w[0], rec.solution.w[1]);
    rec.xi = detector_positions(rec.solution, *rec.delta_balanced);
  }
  return rec;
}

}  // namespace dstomo
