// Acceptance suite: runs every top-level requirement end to end and prints
// one [PASS]/[FAIL] line per criterion. Exit code is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dstomo/design.hpp"
#include "dstomo/labgeom.hpp"
#include "dstomo/rng.hpp"
#include "dstomo/tomo.hpp"
#include "test_support.hpp"

using namespace dstomo;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!notes.empty()) notes += "; ";
      notes += what;
    }
  }
  void note(const std::string& what) {
    if (!notes.empty()) notes += "; ";
    notes += what;
  }
};

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Multistart search over (0, 11] recovers all published solutions.

Check criterion1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  SearchOptions opts;
  opts.zeta_min = 0.0;
  opts.zeta_max = 11.0;
  opts.n_starts = 20000;
  opts.seed = 20250810;
  opts.tol = 1e-12;
  const auto sols = search_tetrahedra(opts);

  for (const auto& [zeta, w] : testsupport::table1_rows()) {
    const TetraSolution target = canonicalize(TetraSolution{zeta, w, 0.0});
    bool matched = false;
    for (const auto& sol : sols) {
      if (std::abs(sol.zeta - zeta) > 1e-2) continue;
      bool w_close = true;
      for (int i = 0; i < 4; ++i)
        w_close = w_close && std::abs(sol.w[static_cast<std::size_t>(i)] -
                                      target.w[static_cast<std::size_t>(i)]) <= 1e-3;
      if (w_close && sol.residual < opts.tol) matched = true;
    }
    c.require(matched, "missing solution at zeta=" + fmt("%.5g", zeta));
  }

  const double dt = elapsed_since(t0);
  c.require(dt < 60.0, "search took " + fmt("%.1f", dt) + " s (budget 60 s)");
  c.note(std::to_string(sols.size()) + " solutions from 20000 starts in " + fmt("%.1f", dt) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 2. Balancing the reference solution yields a true POVM.

Check criterion2() {
  Check c;
  const Design d = reference_design();
  c.require(std::abs(d.delta - 2.76444) <= 1e-3,
            "balanced delta " + fmt("%.6f", d.delta) + " != 2.76444 +- 1e-3");

  const Povm4 povm = povm_of(d);
  c.require(povm.closure_residual < 1e-6,
            "closure residual " + fmt("%.2e", povm.closure_residual));
  for (const auto& el : povm.elements)
    c.require(std::abs(el.weight - 0.5) <= 1e-6, "weight " + fmt("%.8f", el.weight) + " != 1/2");
  c.note("delta=" + fmt("%.6f", d.delta) + ", closure=" + fmt("%.1e", povm.closure_residual));
  return c;
}

// ---------------------------------------------------------------------------
// 3. The four measurement Bloch vectors form the expected tetrahedron.

Check criterion3() {
  Check c;
  const Design d = reference_design();
  std::array<Vec3, 4> s;
  for (int i = 0; i < 4; ++i)
    s[static_cast<std::size_t>(i)] = bloch_of_w(d.solution.w[static_cast<std::size_t>(i)], d.solution.zeta);

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) {
      const double target = (i == j) ? 1.0 : -1.0 / 3.0;
      const double got = dot(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
      c.require(std::abs(got - target) <= 1e-6,
                "gram(" + std::to_string(i) + "," + std::to_string(j) + ") off by " +
                    fmt("%.2e", std::abs(got - target)));
    }

  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (const auto& v : s) {
    c.require(std::abs(std::abs(v.x) - inv_sqrt3) <= 1e-6,
              "|s_x| " + fmt("%.8f", std::abs(v.x)) + " != 1/sqrt(3) +- 1e-6");
    const double lo = std::min(std::abs(v.y), std::abs(v.z));
    const double hi = std::max(std::abs(v.y), std::abs(v.z));
    c.require(std::abs(lo - 0.261804) <= 1e-4, "|s| component " + fmt("%.6f", lo) + " != 0.261804");
    c.require(std::abs(hi - 0.773386) <= 1e-4, "|s| component " + fmt("%.6f", hi) + " != 0.773386");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 4. Published physical geometries within printed rounding.

Check criterion4() {
  Check c;
  const Design d = reference_design();
  struct Row {
    double lambda_nm, a_um, two_d_um, z_det_cm, x3_um, x4_um;
  };
  const Row rows[4] = {{650, 100, 553, 33.53, 63, 242},
                       {780, 62.5, 346, 10.9, 39, 151},
                       {826, 60, 332, 9.5, 38, 145},
                       {810, 40, 221, 3.5, 25, 97}};

  for (const Row& row : rows) {
    const PhysicalGeometry g =
        to_physical(d.solution, d.delta, row.lambda_nm * 1e-9, row.a_um * 1e-6);
    const std::string tag = fmt("%.0f", row.lambda_nm) + " nm/" + fmt("%.3g", row.a_um) + " um";
    c.require(std::abs(g.two_d * 1e6 - row.two_d_um) <= 1.0, tag + ": 2d off");
    c.require(std::abs(g.x[2] * 1e6 - row.x3_um) <= 1.0, tag + ": x3 off");
    c.require(std::abs(g.x[3] * 1e6 - row.x4_um) <= 1.0, tag + ": x4 off");
    c.require(std::abs(g.z_det * 1e2 - row.z_det_cm) <= 0.05,
              tag + ": z_det computed " + fmt("%.3f", g.z_det * 1e2) + " cm vs printed " +
                  fmt("%.2f", row.z_det_cm) + " cm");
  }
  if (!c.ok)
    c.note(
        "the 810 nm/40 um axial entry of the published table is inconsistent with its own "
        "z0 = 2 pi a^2/lambda scale: rows 1-3 all give zeta = z_det lambda/(2 pi a^2) ~ 3.468, "
        "row 4 gives 2.82; the formula value is 4.304 cm");
  return c;
}

// ---------------------------------------------------------------------------
// 5. Closed-form propagation against the quadrature oracle.

Check criterion5() {
  Check c;
  const SlitConfig cfg{2.76444};
  const Grid in_grid = default_grid(0.0, cfg);
  const SampledField in =
      make_field(in_grid, [&](double xi) { return std::complex<double>(slit_mode(1, xi, cfg)); });
  c.require(std::abs(field_norm_squared(in) - 1.0) < 1e-8, "input norm");

  for (const double zeta : {0.5, 3.4678, 10.0}) {
    const Grid out_grid = default_grid(zeta, cfg);
    const SampledField out = fresnel_propagate(in, zeta, out_grid);
    double max_err = 0.0;
    for (std::size_t i = 0; i < out_grid.n; ++i)
      max_err = std::max(max_err,
                         std::abs(out.values[i] - propagate_mode(1, {out_grid.xi(i), zeta}, cfg)));
    c.require(max_err < 1e-6,
              "zeta=" + fmt("%.4g", zeta) + ": max-abs " + fmt("%.2e", max_err));
    c.require(std::abs(field_norm_squared(out) - 1.0) < 1e-8,
              "zeta=" + fmt("%.4g", zeta) + ": norm drift");
    c.note("zeta=" + fmt("%.4g", zeta) + " max-abs " + fmt("%.1e", max_err));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Slit-mode overlap: closed form vs quadrature, order of magnitude.

Check criterion6() {
  Check c;
  const SlitConfig cfg{2.76444};
  const double closed = mode_overlap(cfg);
  c.require(closed >= 1e-4 && closed < 1e-3,
            "overlap " + fmt("%.3e", closed) + " not of order 1e-4");

  const double quad = testsupport::trapezoid(
      [&](double xi) { return slit_mode(1, xi, cfg) * slit_mode(2, xi, cfg); }, -40.0, 40.0, 16000);
  c.require(std::abs(quad - closed) <= 1e-8 * closed,
            "quadrature " + fmt("%.12e", quad) + " vs closed form " + fmt("%.12e", closed));
  c.note("overlap " + fmt("%.4e", closed));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Noiseless tomography round trip; the two estimators coincide.

Check criterion7() {
  Check c;
  const Povm4 povm = povm_of(reference_design());

  std::mt19937_64 eng(71);
  double worst_rt = 0.0;
  for (int i = 0; i < 200; ++i) {
    const BlochState rho = random_mixed_state(eng);
    const Vec3 back = linear_invert(ideal_probabilities(rho, povm), povm).r_hat;
    worst_rt = std::max(worst_rt, norm(back - rho.r));
  }
  c.require(worst_rt < 1e-10, "round trip error " + fmt("%.2e", worst_rt));

  double worst_agree = 0.0;
  for (int i = 0; i < 50; ++i) {
    BlochState rho = random_mixed_state(eng);
    rho.r = rho.r * 0.98;  // interior states
    const auto p = ideal_probabilities(rho, povm);
    CountRecord counts;
    for (int k = 0; k < 4; ++k)
      counts.n[static_cast<std::size_t>(k)] =
          static_cast<std::uint64_t>(std::llround(p[static_cast<std::size_t>(k)] * 1e9));
    counts.n_total = counts.accepted();
    MleOptions mle_opts;
    mle_opts.tol = 1e-15;
    mle_opts.max_iters = 50000;
    const BlochState mle = mle_reconstruct(counts, povm, mle_opts);
    worst_agree = std::max(worst_agree, norm(mle.r - linear_invert(p, povm).r_hat));
  }
  c.require(worst_agree < 1e-6, "mle vs linear inversion " + fmt("%.2e", worst_agree));
  c.note("round trip " + fmt("%.1e", worst_rt) + ", estimator agreement " + fmt("%.1e", worst_agree));
  return c;
}

// ---------------------------------------------------------------------------
// 8. Finite-count tomography: fidelity and 1/sqrt(n) error scaling.

Check criterion8() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  const Design d = reference_design(0.01);
  const DetectorLayout layout = layout_of(d);
  const Povm4 povm = povm_of(d);

  const int n_states = 50;
  const std::vector<std::uint64_t> targets{1000, 10000, 100000, 1000000};

  std::mt19937_64 state_eng(2025);
  std::vector<BlochState> states;
  states.reserve(n_states);
  for (int i = 0; i < n_states; ++i) states.push_back(random_mixed_state(state_eng));

  std::vector<std::array<double, 4>> li_errors(n_states);
  std::vector<double> fidelities(n_states);

  const auto worker = [&](int begin, int step) {
    for (int i = begin; i < n_states; i += step) {
      const auto recs = simulate_to_accepted(states[static_cast<std::size_t>(i)], layout, targets,
                                             9000 + static_cast<std::uint64_t>(i), 2000000000ULL);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& rec = recs[t];
        std::array<double, 4> p_hat;
        for (int k = 0; k < 4; ++k)
          p_hat[static_cast<std::size_t>(k)] =
              static_cast<double>(rec.n[static_cast<std::size_t>(k)]) /
              static_cast<double>(rec.accepted());
        const Vec3 li = linear_invert(p_hat, povm).r_hat;
        li_errors[static_cast<std::size_t>(i)][t] = norm(li - states[static_cast<std::size_t>(i)].r);
        if (targets[t] == 100000) {
          const BlochState mle = mle_reconstruct(rec, povm);
          fidelities[static_cast<std::size_t>(i)] =
              fidelity(mle, states[static_cast<std::size_t>(i)]);
        }
      }
    }
  };

  const int n_threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
  worker(0, n_threads);
  for (auto& th : pool) th.join();

  double mean_fid = 0.0, min_fid = 1.0;
  for (const double f : fidelities) {
    mean_fid += f;
    min_fid = std::min(min_fid, f);
  }
  mean_fid /= n_states;
  c.require(mean_fid > 0.999, "mean fidelity " + fmt("%.6f", mean_fid) + " at 1e5 accepted");

  std::vector<double> log_n, log_err;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double mean_err = 0.0;
    for (int i = 0; i < n_states; ++i) mean_err += li_errors[static_cast<std::size_t>(i)][t];
    mean_err /= n_states;
    log_n.push_back(std::log(static_cast<double>(targets[t])));
    log_err.push_back(std::log(mean_err));
  }
  const double slope = testsupport::fit_slope(log_n, log_err);
  c.require(std::abs(slope + 0.5) <= 0.1, "error-scaling exponent " + fmt("%.3f", slope));

  const double dt = elapsed_since(t0);
  c.note("mean fidelity " + fmt("%.5f", mean_fid) + " (min " + fmt("%.5f", min_fid) +
         "), exponent " + fmt("%.3f", slope) + ", " + fmt("%.0f", dt) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Envelope equality at detectors only for the balanced slit separation.

Check criterion9() {
  Check c;
  const Design d = reference_design();
  const double zeta = d.solution.zeta;

  // emit the three comparison curves through the CLI when available
  const std::string cli = testsupport::cli_path();
  const fs::path dir = fs::temp_directory_path() / "dstomo_acceptance";
  fs::create_directories(dir);
  if (!cli.empty()) {
    int emitted = 0;
    for (const double delta : {1.50, d.delta, 3.50}) {
      std::ostringstream cmd;
      const fs::path out = dir / ("envelope_" + fmt("%.6f", delta) + ".csv");
      cmd << cli << " pattern --zeta " << zeta << " --delta " << delta
          << " --xi-min -12 --xi-max 12 --step 0.01 --out " << out << " >/dev/null 2>&1";
      if (std::system(cmd.str().c_str()) == 0 && fs::file_size(out) > 1000) ++emitted;
    }
    c.require(emitted == 3, "pattern emission failed");
  } else {
    c.note("CLI path not set; spread checked directly");
  }

  for (const double delta : {1.50, d.delta, 3.50}) {
    TetraSolution sol = d.solution;
    const auto xi = detector_positions(sol, delta);
    const SlitConfig cfg{delta};
    double lo = 1e300, hi = 0.0;
    for (const double x : xi) {
      const double v = intensity_envelope({x, zeta}, cfg);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double spread = (hi - lo) / (0.5 * (hi + lo));
    if (std::abs(delta - d.delta) < 1e-12) {
      c.require(spread < 1e-4, "balanced spread " + fmt("%.2e", spread));
      c.note("balanced spread " + fmt("%.1e", spread));
    } else {
      c.require(spread > 1e-2,
                "delta=" + fmt("%.2f", delta) + " spread " + fmt("%.2e", spread) + " too small");
      c.note("delta=" + fmt("%.2f", delta) + " spread " + fmt("%.1e", spread));
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "published solution table reproduced by multistart search", criterion1},
      {2, "balanced slit separation yields a true POVM", criterion2},
      {3, "measurement Bloch vectors form the regular tetrahedron", criterion3},
      {4, "published physical geometries within printed rounding", criterion4},
      {5, "closed-form propagation matches the quadrature oracle", criterion5},
      {6, "slit-mode overlap: quadrature vs closed form", criterion6},
      {7, "noiseless tomography round trip and estimator agreement", criterion7},
      {8, "finite-count tomography: fidelity and error scaling", criterion8},
      {9, "envelope equal at detectors only when balanced", criterion9},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    Check c;
    try {
      c = entry.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.note(std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", entry.id, entry.name,
                c.notes.empty() ? "" : " -- ", c.notes.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures;
}
