#include "dstomo/serialize.hpp"

namespace dstomo {

using nlohmann::json;

void to_json(json& j, const TetraSolution& s) {
  j = json{{"zeta", s.zeta}, {"w", s.w}, {"residual", s.residual}};
}

void from_json(const json& j, TetraSolution& s) {
  j.at("zeta").get_to(s.zeta);
  j.at("w").get_to(s.w);
  j.at("residual").get_to(s.residual);
}

void to_json(json& j, const SolutionRecord& r) {
  to_json(j, r.solution);
  if (r.delta_balanced) j["delta_balanced"] = *r.delta_balanced;
  if (r.xi) j["xi"] = *r.xi;
  j["gram_max_error"] = r.gram_max_err;
}

void from_json(const json& j, SolutionRecord& r) {
  from_json(j, r.solution);
  if (j.contains("delta_balanced")) r.delta_balanced = j.at("delta_balanced").get<double>();
  if (j.contains("xi")) r.xi = j.at("xi").get<std::array<double, 4>>();
  r.gram_max_err = j.value("gram_max_error", 0.0);
}

void to_json(json& j, const Design& d) {
  to_json(j, d.solution);
  j["delta"] = d.delta;
  j["delta_xi"] = d.delta_xi;
  j["xi"] = detector_positions(d.solution, d.delta);
}

void from_json(const json& j, Design& d) {
  from_json(j, d.solution);
  j.at("delta").get_to(d.delta);
  d.delta_xi = j.value("delta_xi", 1e-3);
}

void to_json(json& j, const CountRecord& c) {
  j = json{{"n", c.n}, {"n_discarded", c.n_discarded}, {"n_total", c.n_total}};
}

void from_json(const json& j, CountRecord& c) {
  j.at("n").get_to(c.n);
  j.at("n_discarded").get_to(c.n_discarded);
  j.at("n_total").get_to(c.n_total);
}

void to_json(json& j, const ReconstructionReport& r) {
  j = json{{"r_hat", std::array<double, 3>{r.r_hat.x, r.r_hat.y, r.r_hat.z}},
           {"method", r.method == ReconstructionMethod::mle ? "mle" : "linear-inversion"},
           {"projected", r.projected}};
  if (r.fidelity) j["fidelity"] = *r.fidelity;
  if (r.trace_distance) j["trace_distance"] = *r.trace_distance;
  if (r.acceptance_fraction) j["acceptance_fraction"] = *r.acceptance_fraction;
}

void from_json(const json& j, ReconstructionReport& r) {
  auto arr = j.at("r_hat").get<std::array<double, 3>>();
  r.r_hat = Vec3{arr[0], arr[1], arr[2]};
  r.method = j.at("method").get<std::string>() == "mle" ? ReconstructionMethod::mle
                                                        : ReconstructionMethod::linear_inversion;
  r.projected = j.value("projected", false);
  if (j.contains("fidelity")) r.fidelity = j.at("fidelity").get<double>();
  if (j.contains("trace_distance")) r.trace_distance = j.at("trace_distance").get<double>();
  if (j.contains("acceptance_fraction"))
    r.acceptance_fraction = j.at("acceptance_fraction").get<double>();
}

void to_json(json& j, const PhysicalGeometry& g) {
  j = json{{"lambda_m", g.lambda}, {"a_m", g.a},       {"two_d_m", g.two_d},
           {"z_det_m", g.z_det},   {"x_m", g.x},       {"z0_m", g.z0}};
}

void from_json(const json& j, PhysicalGeometry& g) {
  j.at("lambda_m").get_to(g.lambda);
  j.at("a_m").get_to(g.a);
  j.at("two_d_m").get_to(g.two_d);
  j.at("z_det_m").get_to(g.z_det);
  j.at("x_m").get_to(g.x);
  j.at("z0_m").get_to(g.z0);
}

void to_json(json& j, const DetectorLayout& l) {
  j = json{{"zeta0", l.zeta0}, {"xi", l.xi}, {"delta_xi", l.delta_xi}, {"delta", l.delta}};
}

void from_json(const json& j, DetectorLayout& l) {
  j.at("zeta0").get_to(l.zeta0);
  j.at("xi").get_to(l.xi);
  j.at("delta_xi").get_to(l.delta_xi);
  j.at("delta").get_to(l.delta);
}

}  // namespace dstomo
