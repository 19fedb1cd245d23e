#include "dstomo/sicsearch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dstomo/rng.hpp"

namespace dstomo {

namespace {

// Pair index order for the six residuals g = s_i.s_j + 1/3, i > j.
constexpr int kPairs[6][2] = {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};

struct BlochDeriv {
  Vec3 s, dw, dzeta;
};

BlochDeriv bloch_deriv(double w, double zeta) {
  const double e = std::exp(-std::abs(w));
  const double c = 2.0 * e / (1.0 + e * e);  // sech
  const double t = std::tanh(w);
  const double theta = w * zeta;
  const double ct = std::cos(theta), st = std::sin(theta);
  BlochDeriv d;
  d.s = {c * ct, c * st, -t};
  d.dw = {-c * (t * ct + zeta * st), -c * (t * st - zeta * ct), -c * c};
  d.dzeta = {-c * w * st, c * w * ct, 0.0};
  return d;
}

std::array<double, 6> pair_residuals(double zeta, const std::array<double, 4>& w) {
  std::array<Vec3, 4> s;
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = bloch_of_w(w[static_cast<std::size_t>(i)], zeta);
  std::array<double, 6> g{};
  for (int m = 0; m < 6; ++m) {
    const auto [i, j] = kPairs[m];
    g[static_cast<std::size_t>(m)] =
        dot(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]) + 1.0 / 3.0;
  }
  return g;
}

// Residuals and the 6x5 Jacobian with respect to (zeta, w1..w4).
void residuals_jacobian(double zeta, const std::array<double, 4>& w, std::array<double, 6>& g,
                        double jac[6][5]) {
  std::array<BlochDeriv, 4> b;
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = bloch_deriv(w[static_cast<std::size_t>(i)], zeta);
  for (int m = 0; m < 6; ++m) {
    const auto [i, j] = kPairs[m];
    const auto& bi = b[static_cast<std::size_t>(i)];
    const auto& bj = b[static_cast<std::size_t>(j)];
    g[static_cast<std::size_t>(m)] = dot(bi.s, bj.s) + 1.0 / 3.0;
    jac[m][0] = dot(bi.dzeta, bj.s) + dot(bi.s, bj.dzeta);
    for (int k = 0; k < 4; ++k) jac[m][1 + k] = 0.0;
    jac[m][1 + i] = dot(bi.dw, bj.s);
    jac[m][1 + j] += dot(bi.s, bj.dw);
  }
}

// Gaussian elimination with partial pivoting for the 5x5 step equation.
bool solve5(double a[5][5], double b[5], double x[5]) {
  int perm[5] = {0, 1, 2, 3, 4};
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double d = a[perm[col]][col];
    if (std::abs(d) < 1e-300) return false;
    for (int r = col + 1; r < 5; ++r) {
      const double f = a[perm[r]][col] / d;
      if (f == 0.0) continue;
      for (int c = col; c < 5; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int row = 4; row >= 0; --row) {
    double acc = b[perm[row]];
    for (int c = row + 1; c < 5; ++c) acc -= a[perm[row]][c] * x[c];
    x[row] = acc / a[perm[row]][row];
  }
  return true;
}

double log_cosh(double w) {
  const double aw = std::abs(w);
  return aw + std::log1p(std::exp(-2.0 * aw)) - 0.6931471805599453;
}

constexpr double kGramTarget = -1.0 / 3.0;

std::array<Vec3, 4> bloch_vectors(const TetraSolution& sol) {
  std::array<Vec3, 4> s;
  for (int i = 0; i < 4; ++i)
    s[static_cast<std::size_t>(i)] = bloch_of_w(sol.w[static_cast<std::size_t>(i)], sol.zeta);
  return s;
}

}  // namespace

double tetra_objective(double zeta, const std::array<double, 4>& w) {
  const auto g = pair_residuals(zeta, w);
  double f = 0.0;
  for (const double v : g) f += v * v;
  return f;
}

std::array<double, 5> objective_gradient(double zeta, const std::array<double, 4>& w) {
  std::array<double, 6> g;
  double jac[6][5];
  residuals_jacobian(zeta, w, g, jac);
  std::array<double, 5> grad{};
  for (int m = 0; m < 6; ++m)
    for (int c = 0; c < 5; ++c)
      grad[static_cast<std::size_t>(c)] += 2.0 * g[static_cast<std::size_t>(m)] * jac[m][c];
  return grad;
}

TetraSolution refine_solution(double zeta, const std::array<double, 4>& w,
                              const RefineOptions& opts) {
  // Damped least-squares (Levenberg-Marquardt) descent on the six pair
  // residuals; each accepted step decreases f.
  double x[5] = {zeta, w[0], w[1], w[2], w[3]};
  std::array<double, 6> g;
  double jac[6][5];
  double lambda = 1e-3;

  auto objective_at = [](const double* p) {
    return tetra_objective(p[0], {p[1], p[2], p[3], p[4]});
  };

  double f = objective_at(x);
  int slow_strikes = 0;  // guards against slow creep toward nonzero minima
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (f < opts.tol) break;
    residuals_jacobian(x[0], {x[1], x[2], x[3], x[4]}, g, jac);

    double grad2 = 0.0;
    double jtg[5] = {0, 0, 0, 0, 0};
    double jtj[5][5] = {};
    for (int c = 0; c < 5; ++c) {
      for (int m = 0; m < 6; ++m) jtg[c] += jac[m][c] * g[static_cast<std::size_t>(m)];
      grad2 += 4.0 * jtg[c] * jtg[c];
      for (int c2 = c; c2 < 5; ++c2) {
        double acc = 0.0;
        for (int m = 0; m < 6; ++m) acc += jac[m][c] * jac[m][c2];
        jtj[c][c2] = jtj[c2][c] = acc;
      }
    }
    if (grad2 < opts.grad_tol * opts.grad_tol) break;

    bool moved = false;
    for (int attempt = 0; attempt < 60 && !moved; ++attempt) {
      double a[5][5];
      double b[5];
      double step[5];
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) a[r][c] = jtj[r][c];
        a[r][r] += lambda * std::max(jtj[r][r], 1e-12);
        b[r] = -jtg[r];
      }
      if (solve5(a, b, step)) {
        double trial[5];
        for (int c = 0; c < 5; ++c) trial[c] = x[c] + step[c];
        const double ftrial = objective_at(trial);
        if (ftrial < f) {
          slow_strikes = (ftrial > 0.99 * f) ? slow_strikes + 1 : 0;
          for (int c = 0; c < 5; ++c) x[c] = trial[c];
          f = ftrial;
          lambda = std::max(lambda / 3.0, 1e-14);
          moved = true;
          break;
        }
      }
      lambda *= 5.0;
      if (lambda > 1e14) break;
    }
    if (!moved) break;  // stalled at a non-tetrahedron stationary point
    if (slow_strikes > 50) break;
  }

  return TetraSolution{x[0], {x[1], x[2], x[3], x[4]}, f};
}

TetraSolution canonicalize(const TetraSolution& sol) {
  TetraSolution out = sol;
  std::sort(out.w.begin(), out.w.end());
  const std::array<double, 4> reflected{-out.w[3], -out.w[2], -out.w[1], -out.w[0]};
  if (std::lexicographical_compare(reflected.begin(), reflected.end(), out.w.begin(),
                                   out.w.end()))
    out.w = reflected;
  return out;
}

std::vector<TetraSolution> dedup_solutions(std::vector<TetraSolution> sols, double tol) {
  for (auto& s : sols) s = canonicalize(s);
  std::sort(sols.begin(), sols.end(), [](const TetraSolution& a, const TetraSolution& b) {
    return a.zeta < b.zeta;
  });
  std::vector<TetraSolution> kept;
  for (const auto& s : sols) {
    bool merged = false;
    for (auto it = kept.rbegin(); it != kept.rend() && s.zeta - it->zeta <= tol; ++it) {
      double d = std::abs(s.zeta - it->zeta);
      for (int i = 0; i < 4; ++i)
        d = std::max(d, std::abs(s.w[static_cast<std::size_t>(i)] - it->w[static_cast<std::size_t>(i)]));
      if (d <= tol) {
        if (s.residual < it->residual) *it = s;
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(), [](const TetraSolution& a, const TetraSolution& b) {
    return a.zeta < b.zeta;
  });
  return kept;
}

std::vector<TetraSolution> search_tetrahedra(const SearchOptions& opts) {
  if (!(opts.zeta_max > opts.zeta_min) || opts.zeta_min < 0.0)
    throw std::invalid_argument("zeta range must satisfy 0 <= zeta_min < zeta_max");
  if (opts.n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");

  RefineOptions refine = opts.refine;
  refine.tol = std::min(refine.tol, 0.01 * opts.tol);  // refine past the acceptance threshold

  std::mt19937_64 engine(opts.seed);
  std::vector<TetraSolution> found;
  for (int k = 0; k < opts.n_starts; ++k) {
    // zeta in (zeta_min, zeta_max], w_i in [-w_box, w_box]
    const double zeta0 = opts.zeta_max - uniform01(engine) * (opts.zeta_max - opts.zeta_min);
    std::array<double, 4> w0;
    for (auto& wi : w0) wi = opts.w_box * (2.0 * uniform01(engine) - 1.0);

    TetraSolution sol = refine_solution(zeta0, w0, refine);
    if (!(sol.residual < opts.tol)) continue;
    if (!(sol.zeta > opts.zeta_min && sol.zeta <= opts.zeta_max)) continue;
    sol = canonicalize(sol);
    // reject coincident detectors
    if (sol.w[1] - sol.w[0] <= opts.dedup_tol || sol.w[2] - sol.w[1] <= opts.dedup_tol ||
        sol.w[3] - sol.w[2] <= opts.dedup_tol)
      continue;
    found.push_back(sol);
  }
  return dedup_solutions(std::move(found), opts.dedup_tol);
}

bool is_reflection_symmetric(const TetraSolution& sol, double tol) {
  const auto& w = sol.w;
  return std::abs(w[0] + w[3]) <= tol && std::abs(w[1] + w[2]) <= tol;
}

double balanced_delta(double zeta, double w1, double w2) {
  if (!(w1 < w2 && w2 < 0.0))
    throw std::invalid_argument("balanced_delta requires w1 < w2 < 0");
  const double num = (1.0 + zeta * zeta) * (w1 * w1 - w2 * w2);
  const double den = log_cosh(w1) - log_cosh(w2);
  return 0.5 * std::sqrt(num / den);
}

std::array<double, 4> detector_positions(const TetraSolution& sol, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const double scale = (1.0 + sol.zeta * sol.zeta) / (2.0 * delta);
  return {sol.w[0] * scale, sol.w[1] * scale, sol.w[2] * scale, sol.w[3] * scale};
}

DetectorLayout make_layout(const TetraSolution& sol, double delta, double delta_xi) {
  return DetectorLayout{sol.zeta, detector_positions(sol, delta), delta_xi, delta};
}

Povm4 build_povm(const TetraSolution& sol, double delta, double delta_xi) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  // point-detector criterion: w must vary by < 1e-2 across a window
  const double w_span = 4.0 * delta * delta_xi / (1.0 + sol.zeta * sol.zeta);
  if (!(delta_xi > 0.0) || w_span >= 1e-2)
    throw std::invalid_argument("delta_xi violates the point-detector criterion");

  const SlitConfig cfg{delta};
  const auto xi = detector_positions(sol, delta);
  std::array<double, 4> intensity;
  double sigma = 0.0;
  for (int i = 0; i < 4; ++i) {
    intensity[static_cast<std::size_t>(i)] =
        intensity_envelope({xi[static_cast<std::size_t>(i)], sol.zeta}, cfg);
    sigma += intensity[static_cast<std::size_t>(i)] * delta_xi;
  }
  sigma *= 0.5;

  Povm4 povm;
  Mat2 sum{};
  for (int i = 0; i < 4; ++i) {
    auto& el = povm.elements[static_cast<std::size_t>(i)];
    el.weight = intensity[static_cast<std::size_t>(i)] * delta_xi / sigma;
    el.s = bloch_of_w(sol.w[static_cast<std::size_t>(i)], sol.zeta);
    sum = sum + Mat2::from_bloch(el.s) * el.weight;  // E_i = c_i (I + s_i.sigma)/2
  }
  povm.closure_residual = (sum - Mat2::identity()).frobenius_norm();
  return povm;
}

double gram_max_error(const TetraSolution& sol) {
  const auto s = bloch_vectors(sol);
  double err = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) {
      const double target = (i == j) ? 1.0 : kGramTarget;
      err = std::max(err, std::abs(dot(s[static_cast<std::size_t>(i)],
                                       s[static_cast<std::size_t>(j)]) - target));
    }
  return err;
}

}  // namespace dstomo
