// dstomo: design and simulate single-plane tetrahedron (SIC-POVM) tomography
// of double-slit qubits.
//
// Exit codes: 0 success, 2 invalid configuration, 3 no solutions found,
// 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dstomo/design.hpp"
#include "dstomo/labgeom.hpp"
#include "dstomo/rng.hpp"
#include "dstomo/serialize.hpp"
#include "dstomo/tomo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dstomo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNoSolutions = 3;
constexpr int kExitIo = 4;

struct CliError {
  int code;
  std::string message;
};

fs::path resolve_out(const std::string& path) {
  fs::path p(path);
  const char* dir = std::getenv("DSTOMO_OUT_DIR");
  if (dir != nullptr && *dir != '\0' && p.is_relative()) return fs::path(dir) / p;
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CliError{kExitIo, "cannot open " + path.string() + " for writing"};
  os << text;
  if (!os) throw CliError{kExitIo, "write failed: " + path.string()};
}

json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CliError{kExitIo, "cannot read " + path};
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw CliError{kExitInvalid, path + ": " + e.what()};
  }
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// CSV files start with '# key=value' lines carrying the resolved config.
std::string csv_header(const std::string& command, const json& config) {
  std::ostringstream os;
  os << "# dstomo " << command << "\n";
  for (auto it = config.begin(); it != config.end(); ++it)
    os << "# " << it.key() << "=" << it.value().dump() << "\n";
  return os.str();
}

Vec3 parse_state(const std::string& spec, const Povm4* povm) {
  if (spec == "mixed") return {0, 0, 0};
  if (spec == "psi1") return {0, 0, 1};
  if (spec == "psi2") return {0, 0, -1};
  if (spec == "plus") return {1, 0, 0};
  if (spec == "minus") return {-1, 0, 0};
  if (spec.size() == 2 && spec[0] == 's' && spec[1] >= '1' && spec[1] <= '4') {
    if (povm == nullptr)
      throw CliError{kExitInvalid, "state '" + spec + "' needs a design (use --preset or --design)"};
    return povm->elements[static_cast<std::size_t>(spec[1] - '1')].s;
  }
  Vec3 r;
  char comma1 = 0, comma2 = 0;
  std::istringstream is(spec);
  if (!(is >> r.x >> comma1 >> r.y >> comma2 >> r.z) || comma1 != ',' || comma2 != ',')
    throw CliError{kExitInvalid, "state must be rx,ry,rz or one of mixed|psi1|psi2|plus|minus|s1..s4"};
  if (!BlochState{r}.is_physical())
    throw CliError{kExitInvalid, "state Bloch vector exceeds unit length"};
  return r;
}

struct DesignSource {
  bool preset = false;
  std::string file;
  int index = 0;
  double delta_xi = 1e-3;
  std::optional<double> delta_override;

  void add_options(CLI::App* cmd) {
    cmd->add_flag("--preset", preset, "use the bundled reference design (zeta~3.4678, balanced)");
    cmd->add_option("--design", file, "design JSON file, or a search catalog");
    cmd->add_option("--index", index, "solution index when --design is a catalog")
        ->capture_default_str();
    cmd->add_option("--delta-xi", delta_xi, "detector half-width (dimensionless)")
        ->capture_default_str();
    cmd->add_option("--delta", delta_override, "override the slit half-separation");
  }

  Design load() const {
    Design d;
    if (preset == !file.empty())
      throw CliError{kExitInvalid, "exactly one of --preset or --design is required"};
    if (preset) {
      d = reference_design(delta_xi);
    } else {
      const json j = read_json(file);
      try {
        if (j.contains("solutions")) {
          const auto& arr = j.at("solutions");
          if (index < 0 || static_cast<std::size_t>(index) >= arr.size())
            throw CliError{kExitInvalid, "--index out of range for " + file};
          const auto rec = arr.at(static_cast<std::size_t>(index)).get<SolutionRecord>();
          if (!rec.delta_balanced && !delta_override)
            throw CliError{kExitInvalid,
                           "catalog entry has no balanced delta; pass --delta explicitly"};
          d.solution = rec.solution;
          d.delta = rec.delta_balanced.value_or(1.0);
          d.delta_xi = delta_xi;
        } else {
          d = j.get<Design>();
          d.delta_xi = delta_xi;
        }
      } catch (const json::exception& e) {
        throw CliError{kExitInvalid, file + ": " + e.what()};
      }
    }
    if (delta_override) d.delta = *delta_override;
    return d;
  }
};

json design_json(const Design& d) {
  json j = d;
  return j;
}

json report_json(const Vec3& r_hat, ReconstructionMethod method, bool projected,
                 const std::optional<Vec3>& truth, double acceptance) {
  ReconstructionReport rep;
  rep.r_hat = r_hat;
  rep.method = method;
  rep.projected = projected;
  rep.acceptance_fraction = acceptance;
  if (truth) {
    const BlochState est{r_hat};
    const BlochState tru{*truth};
    rep.fidelity = fidelity(est, tru);
    rep.trace_distance = trace_distance(est, tru);
  }
  return json(rep);
}

// ---------------------------------------------------------------------------

int cmd_search(double zeta_min, double zeta_max, int starts, std::uint64_t seed, double tol,
               const std::string& out) {
  SearchOptions opts;
  opts.zeta_min = zeta_min;
  opts.zeta_max = zeta_max;
  opts.n_starts = starts;
  opts.seed = seed;
  opts.tol = tol;
  std::vector<TetraSolution> sols;
  try {
    sols = search_tetrahedra(opts);
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitInvalid, e.what()};
  }

  json catalog;
  catalog["command"] = "search";
  catalog["config"] = {{"zeta_min", zeta_min}, {"zeta_max", zeta_max}, {"starts", starts},
                       {"seed", seed},         {"tol", tol}};
  catalog["solutions"] = json::array();
  for (const auto& s : sols) catalog["solutions"].push_back(json(annotate(s)));
  write_text(resolve_out(out), catalog.dump(2) + "\n");

  std::cout << "search: " << sols.size() << " solution(s) in (" << zeta_min << ", " << zeta_max
            << "] -> " << out << "\n";
  return sols.empty() ? kExitNoSolutions : kExitOk;
}

int cmd_pattern(const DesignSource& src, std::optional<double> zeta_opt, const std::string& state,
                double xi_min, double xi_max, double step, const std::string& out) {
  Design d;
  Povm4 povm;
  const Povm4* povm_ptr = nullptr;
  double zeta = 0.0, delta = 0.0;
  if (src.preset || !src.file.empty()) {
    d = src.load();
    povm = povm_of(d);
    povm_ptr = &povm;
    zeta = d.solution.zeta;
    delta = d.delta;
  } else if (zeta_opt && src.delta_override) {
    zeta = *zeta_opt;
    delta = *src.delta_override;
  } else {
    throw CliError{kExitInvalid, "pattern needs --preset/--design or both --zeta and --delta"};
  }
  if (zeta_opt) zeta = *zeta_opt;
  if (!(step > 0.0) || !(xi_max > xi_min))
    throw CliError{kExitInvalid, "grid must satisfy xi_min < xi_max and step > 0"};

  const Vec3 r = parse_state(state, povm_ptr);
  const BlochState rho{r};
  const SlitConfig cfg{delta};

  json config = {{"zeta", zeta},     {"delta", delta}, {"state", {r.x, r.y, r.z}},
                 {"xi_min", xi_min}, {"xi_max", xi_max}, {"step", step}};
  std::ostringstream os;
  os << csv_header("pattern", config);
  os << "xi,envelope,pdf\n";
  for (double xi = xi_min; xi <= xi_max + 0.5 * step; xi += step) {
    const PlanePoint p{xi, zeta};
    os << fmt(xi) << ',' << fmt(intensity_envelope(p, cfg)) << ',' << fmt(detection_pdf(rho, p, cfg))
       << "\n";
  }
  write_text(resolve_out(out), os.str());
  return kExitOk;
}

int cmd_bloch_curve(double zeta, double delta, double xi_min, double xi_max, int samples,
                    const std::string& out) {
  if (samples < 2) throw CliError{kExitInvalid, "need at least 2 samples"};
  if (!(xi_max > xi_min)) throw CliError{kExitInvalid, "xi_min must be below xi_max"};
  const SlitConfig cfg{delta};

  json config = {{"zeta", zeta},     {"delta", delta},   {"xi_min", xi_min},
                 {"xi_max", xi_max}, {"samples", samples}};
  std::ostringstream os;
  os << csv_header("bloch-curve", config);
  os << "xi,s_x,s_y,s_z\n";
  for (int i = 0; i < samples; ++i) {
    const double xi = xi_min + (xi_max - xi_min) * i / (samples - 1);
    const Vec3 s = bloch_of_w(w_of(xi, zeta, cfg), zeta);
    os << fmt(xi) << ',' << fmt(s.x) << ',' << fmt(s.y) << ',' << fmt(s.z) << "\n";
  }
  write_text(resolve_out(out), os.str());
  return kExitOk;
}

int cmd_simulate(const DesignSource& src, const std::string& state, std::uint64_t photons,
                 std::uint64_t seed, const std::string& out, const std::string& positions_csv) {
  const Design d = src.load();
  const Povm4 povm = povm_of(d);
  const DetectorLayout layout = layout_of(d);
  const Vec3 r = parse_state(state, &povm);
  const BlochState rho{r};
  if (photons < 1) throw CliError{kExitInvalid, "--photons must be at least 1"};

  CountRecord rec;
  if (positions_csv.empty()) {
    rec = simulate_counts(rho, layout, photons, seed);
  } else {
    // identical stream to simulate_counts, with positions mirrored to CSV
    const auto positions = sample_positions(rho, layout, photons, seed);
    rec = bin_counts(positions, layout);
    std::ostringstream os;
    os << "xi\n";
    for (const double xi : positions) os << fmt(xi) << "\n";
    write_text(resolve_out(positions_csv), os.str());
  }

  json j;
  j["command"] = "simulate";
  j["config"] = {{"design", design_json(d)},
                 {"state", {r.x, r.y, r.z}},
                 {"photons", photons},
                 {"seed", seed}};
  if (!positions_csv.empty()) j["config"]["positions_csv"] = positions_csv;
  j["counts"] = rec;
  j["acceptance_fraction"] =
      static_cast<double>(rec.accepted()) / static_cast<double>(rec.n_total);
  write_text(resolve_out(out), j.dump(2) + "\n");

  std::cout << "simulate: " << rec.accepted() << " of " << rec.n_total << " photons accepted -> "
            << out << "\n";
  return kExitOk;
}

int cmd_reconstruct(const std::string& counts_path, const DesignSource& src,
                    const std::string& true_state, bool artificial_balance, int mle_iters,
                    double mle_tol, const std::string& out) {
  const json counts_doc = read_json(counts_path);
  CountRecord rec;
  Design design;
  bool have_design = false;
  std::optional<Vec3> truth;

  try {
    rec = counts_doc.at("counts").get<CountRecord>();
    if (counts_doc.contains("config") && counts_doc.at("config").contains("design")) {
      design = counts_doc.at("config").at("design").get<Design>();
      have_design = true;
    }
    if (true_state.empty() && counts_doc.contains("config") &&
        counts_doc.at("config").contains("state")) {
      const auto arr = counts_doc.at("config").at("state").get<std::array<double, 3>>();
      truth = Vec3{arr[0], arr[1], arr[2]};
    }
  } catch (const json::exception& e) {
    throw CliError{kExitInvalid, counts_path + ": " + e.what()};
  }

  if (src.preset || !src.file.empty()) {
    const Design given = src.load();
    if (have_design) {
      double mismatch = std::abs(given.delta - design.delta);
      mismatch = std::max(mismatch, std::abs(given.solution.zeta - design.solution.zeta));
      for (int i = 0; i < 4; ++i)
        mismatch = std::max(mismatch, std::abs(given.solution.w[static_cast<std::size_t>(i)] -
                                               design.solution.w[static_cast<std::size_t>(i)]));
      if (mismatch > 1e-9)
        throw CliError{kExitInvalid, "design does not match the one embedded in " + counts_path};
    }
    design = given;
    have_design = true;
  }
  if (!have_design)
    throw CliError{kExitInvalid, "counts file has no embedded design; pass --preset or --design"};

  if (rec.accepted() == 0) throw CliError{kExitInvalid, "no accepted photons to reconstruct from"};
  const Povm4 povm = povm_of(design);
  if (!true_state.empty()) truth = parse_state(true_state, &povm);

  std::array<double, 4> p_hat;
  for (int i = 0; i < 4; ++i)
    p_hat[static_cast<std::size_t>(i)] =
        static_cast<double>(rec.n[static_cast<std::size_t>(i)]) / static_cast<double>(rec.accepted());

  const double acceptance =
      static_cast<double>(rec.accepted()) / static_cast<double>(rec.n_total);

  const LinearInversion li = linear_invert(p_hat, povm, artificial_balance);
  const ProjectedState li_proj = project_physical(li.r_hat);
  const BlochState mle = mle_reconstruct(rec, povm, MleOptions{mle_iters, mle_tol});

  json j;
  j["command"] = "reconstruct";
  j["config"] = {{"counts", counts_path},
                 {"design", design_json(design)},
                 {"artificial_balance", artificial_balance},
                 {"mle_iters", mle_iters},
                 {"mle_tol", mle_tol}};
  j["counts"] = rec;
  j["linear_inversion"] = report_json(li_proj.state.r, ReconstructionMethod::linear_inversion,
                                      li_proj.projected, truth, acceptance);
  j["linear_inversion"]["r_hat_raw"] = {li.r_hat.x, li.r_hat.y, li.r_hat.z};
  if (li.rank_deficient) {
    j["linear_inversion"]["rank_deficient"] = true;
    json dirs = json::array();
    for (const auto& v : li.noninformative) dirs.push_back({v.x, v.y, v.z});
    j["linear_inversion"]["noninformative_directions"] = dirs;
  }
  j["mle"] = report_json(mle.r, ReconstructionMethod::mle, false, truth, acceptance);
  write_text(resolve_out(out), j.dump(2) + "\n");

  std::cout << "reconstruct: linear inversion |r|=" << norm(li_proj.state.r)
            << (li_proj.projected ? " (projected)" : "") << ", mle |r|=" << norm(mle.r) << " -> "
            << out << "\n";
  return kExitOk;
}

int cmd_geometry(const DesignSource& src, const std::vector<std::string>& pairs,
                 const std::string& out) {
  const Design d = src.load();
  if (pairs.empty()) throw CliError{kExitInvalid, "need at least one --pair lambda_nm,a_um"};

  json config = {{"design", design_json(d)}, {"pairs", pairs}};
  std::ostringstream os;
  os << csv_header("geometry", config);
  os << "lambda_nm,a_um,two_d_um,z_det_cm,x3_um,x4_um\n";
  for (const auto& pair : pairs) {
    double lambda_nm = 0.0, a_um = 0.0;
    char comma = 0;
    std::istringstream is(pair);
    if (!(is >> lambda_nm >> comma >> a_um) || comma != ',' || lambda_nm <= 0.0 || a_um <= 0.0)
      throw CliError{kExitInvalid, "--pair must be lambda_nm,a_um with positive values"};
    const PhysicalGeometry g = to_physical(d.solution, d.delta, lambda_nm * 1e-9, a_um * 1e-6);
    os << fmt(lambda_nm) << ',' << fmt(a_um) << ',' << fmt(g.two_d * 1e6) << ','
       << fmt(g.z_det * 1e2) << ',' << fmt(g.x[2] * 1e6) << ',' << fmt(g.x[3] * 1e6) << "\n";
  }
  write_text(resolve_out(out), os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-plane tetrahedron (SIC-POVM) tomography of double-slit qubits"};
  app.require_subcommand(1);

  // search
  auto* search = app.add_subcommand("search", "multistart tetrahedron search over (zeta_min, zeta_max]");
  double zeta_min = 0.0, zeta_max = 11.0, tol = 1e-12;
  int starts = 20000;
  std::uint64_t seed = 0;
  std::string out;
  search->add_option("--zeta-min", zeta_min, "lower edge (exclusive)")->capture_default_str();
  search->add_option("--zeta-max", zeta_max, "upper edge (inclusive)")->capture_default_str();
  search->add_option("--starts", starts, "number of random starts")->capture_default_str();
  search->add_option("--seed", seed, "random seed")->capture_default_str();
  search->add_option("--tol", tol, "acceptance tolerance on the objective")->capture_default_str();
  search->add_option("--out", out, "output catalog (JSON)")->required();

  // pattern
  auto* pattern = app.add_subcommand("pattern", "intensity envelope and detection density (CSV)");
  DesignSource pattern_src;
  pattern_src.add_options(pattern);
  std::optional<double> pattern_zeta;
  std::string pattern_state = "mixed", pattern_out;
  double pat_min = -12.0, pat_max = 12.0, pat_step = 0.01;
  pattern->add_option("--zeta", pattern_zeta, "detection plane");
  pattern->add_option("--state", pattern_state, "Bloch vector rx,ry,rz or preset name")
      ->capture_default_str();
  pattern->add_option("--xi-min", pat_min, "")->capture_default_str();
  pattern->add_option("--xi-max", pat_max, "")->capture_default_str();
  pattern->add_option("--step", pat_step, "")->capture_default_str();
  pattern->add_option("--out", pattern_out, "output CSV")->required();

  // bloch-curve
  auto* curve = app.add_subcommand("bloch-curve", "measurement Bloch vector along a plane (CSV)");
  double curve_zeta = 3.4678, curve_delta = 2.76444, curve_min = -12.0, curve_max = 12.0;
  int curve_samples = 1001;
  std::string curve_out;
  curve->add_option("--zeta", curve_zeta, "detection plane")->capture_default_str();
  curve->add_option("--delta", curve_delta, "slit half-separation")->capture_default_str();
  curve->add_option("--xi-min", curve_min, "")->capture_default_str();
  curve->add_option("--xi-max", curve_max, "")->capture_default_str();
  curve->add_option("--samples", curve_samples, "")->capture_default_str();
  curve->add_option("--out", curve_out, "output CSV")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "photon counting at a design (JSON counts)");
  DesignSource sim_src;
  sim_src.add_options(simulate);
  std::string sim_state = "mixed", sim_out, sim_positions;
  std::uint64_t sim_photons = 1000000, sim_seed = 0;
  simulate->add_option("--state", sim_state, "Bloch vector rx,ry,rz or preset name")
      ->capture_default_str();
  simulate->add_option("--photons", sim_photons, "total photons to simulate")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  simulate->add_option("--positions", sim_positions, "also stream sampled positions to this CSV");
  simulate->add_option("--out", sim_out, "output counts (JSON)")->required();

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "state estimates from counts (JSON report)");
  DesignSource rec_src;
  rec_src.add_options(reconstruct);
  std::string rec_counts, rec_true, rec_out;
  bool rec_balance = false;
  int rec_mle_iters = 5000;
  double rec_mle_tol = 1e-12;
  reconstruct->add_option("--counts", rec_counts, "counts JSON from simulate")->required();
  reconstruct->add_option("--true-state", rec_true, "known true state for fidelity reporting");
  reconstruct->add_flag("--artificial-balance", rec_balance,
                        "rescale counts as if the weights were equal before inverting");
  reconstruct->add_option("--mle-iters", rec_mle_iters, "")->capture_default_str();
  reconstruct->add_option("--mle-tol", rec_mle_tol, "")->capture_default_str();
  reconstruct->add_option("--out", rec_out, "output report (JSON)")->required();

  // geometry
  auto* geometry = app.add_subcommand("geometry", "physical geometry rows (CSV)");
  DesignSource geo_src;
  geo_src.add_options(geometry);
  std::vector<std::string> geo_pairs;
  std::string geo_out;
  geometry->add_option("--pair", geo_pairs, "wavelength and slit width as lambda_nm,a_um")
      ->expected(-1);
  geometry->add_option("--out", geo_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (search->parsed()) return cmd_search(zeta_min, zeta_max, starts, seed, tol, out);
    if (pattern->parsed())
      return cmd_pattern(pattern_src, pattern_zeta, pattern_state, pat_min, pat_max, pat_step,
                         pattern_out);
    if (curve->parsed())
      return cmd_bloch_curve(curve_zeta, curve_delta, curve_min, curve_max, curve_samples,
                             curve_out);
    if (simulate->parsed())
      return cmd_simulate(sim_src, sim_state, sim_photons, sim_seed, sim_out, sim_positions);
    if (reconstruct->parsed())
      return cmd_reconstruct(rec_counts, rec_src, rec_true, rec_balance, rec_mle_iters,
                             rec_mle_tol, rec_out);
    if (geometry->parsed()) return cmd_geometry(geo_src, geo_pairs, geo_out);
  } catch (const CliError& e) {
    std::cerr << "dstomo: " << e.message << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dstomo: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "dstomo: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInvalid;
}
