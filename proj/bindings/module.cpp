#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dstomo/design.hpp"
#include "dstomo/labgeom.hpp"
#include "dstomo/tomo.hpp"

namespace py = pybind11;
using namespace dstomo;

namespace {

Vec3 vec3_of(const std::array<double, 3>& a) { return Vec3{a[0], a[1], a[2]}; }
std::array<double, 3> arr_of(const Vec3& v) { return {v.x, v.y, v.z}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Single-plane tetrahedron (SIC-POVM) tomography of double-slit qubits";

  py::class_<TetraSolution>(m, "TetraSolution")
      .def(py::init<>())
      .def(py::init([](double zeta, const std::array<double, 4>& w, double residual) {
             return TetraSolution{zeta, w, residual};
           }),
           py::arg("zeta"), py::arg("w"), py::arg("residual") = 0.0)
      .def_readwrite("zeta", &TetraSolution::zeta)
      .def_readwrite("w", &TetraSolution::w)
      .def_readwrite("residual", &TetraSolution::residual)
      .def("__repr__", [](const TetraSolution& s) {
        return "TetraSolution(zeta=" + std::to_string(s.zeta) + ", residual=" +
               std::to_string(s.residual) + ")";
      });

  py::class_<PovmElement>(m, "PovmElement")
      .def_readonly("weight", &PovmElement::weight)
      .def_property_readonly("s", [](const PovmElement& e) { return arr_of(e.s); });

  py::class_<Povm4>(m, "Povm4")
      .def_readonly("elements", &Povm4::elements)
      .def_readonly("closure_residual", &Povm4::closure_residual);

  py::class_<DetectorLayout>(m, "DetectorLayout")
      .def(py::init<>())
      .def_readwrite("zeta0", &DetectorLayout::zeta0)
      .def_readwrite("xi", &DetectorLayout::xi)
      .def_readwrite("delta_xi", &DetectorLayout::delta_xi)
      .def_readwrite("delta", &DetectorLayout::delta);

  py::class_<CountRecord>(m, "CountRecord")
      .def(py::init<>())
      .def_readwrite("n", &CountRecord::n)
      .def_readwrite("n_discarded", &CountRecord::n_discarded)
      .def_readwrite("n_total", &CountRecord::n_total)
      .def("accepted", &CountRecord::accepted);

  py::class_<Design>(m, "Design")
      .def_readonly("solution", &Design::solution)
      .def_readonly("delta", &Design::delta)
      .def_readonly("delta_xi", &Design::delta_xi);

  py::class_<PhysicalGeometry>(m, "PhysicalGeometry")
      .def_readonly("lambda_m", &PhysicalGeometry::lambda)
      .def_readonly("a_m", &PhysicalGeometry::a)
      .def_readonly("two_d_m", &PhysicalGeometry::two_d)
      .def_readonly("z_det_m", &PhysicalGeometry::z_det)
      .def_readonly("x_m", &PhysicalGeometry::x)
      .def_readonly("z0_m", &PhysicalGeometry::z0);

  // wavefield
  m.def(
      "slit_mode",
      [](int k, double xi, double delta) { return slit_mode(k, xi, SlitConfig{delta}); },
      py::arg("k"), py::arg("xi"), py::arg("delta"));
  m.def(
      "propagate_mode",
      [](int k, double xi, double zeta, double delta) {
        return propagate_mode(k, {xi, zeta}, SlitConfig{delta});
      },
      py::arg("k"), py::arg("xi"), py::arg("zeta"), py::arg("delta"));
  m.def(
      "intensity_envelope",
      [](double xi, double zeta, double delta) {
        return intensity_envelope({xi, zeta}, SlitConfig{delta});
      },
      py::arg("xi"), py::arg("zeta"), py::arg("delta"));
  m.def(
      "w_of", [](double xi, double zeta, double delta) { return w_of(xi, zeta, SlitConfig{delta}); },
      py::arg("xi"), py::arg("zeta"), py::arg("delta"));
  m.def(
      "bloch_of_w", [](double w, double zeta) { return arr_of(bloch_of_w(w, zeta)); },
      py::arg("w"), py::arg("zeta"));
  m.def(
      "projector_of",
      [](double xi, double zeta, double delta) {
        const Mat2 p = projector_of({xi, zeta}, SlitConfig{delta});
        return std::array<std::array<std::complex<double>, 2>, 2>{
            {{p(0, 0), p(0, 1)}, {p(1, 0), p(1, 1)}}};
      },
      py::arg("xi"), py::arg("zeta"), py::arg("delta"));
  m.def(
      "detection_pdf",
      [](const std::array<double, 3>& r, double xi, double zeta, double delta) {
        return detection_pdf(BlochState{vec3_of(r)}, {xi, zeta}, SlitConfig{delta});
      },
      py::arg("r"), py::arg("xi"), py::arg("zeta"), py::arg("delta"));
  m.def(
      "mode_overlap", [](double delta) { return mode_overlap(SlitConfig{delta}); },
      py::arg("delta"));

  // sicsearch
  m.def("tetra_objective", &dstomo::tetra_objective, py::arg("zeta"), py::arg("w"));
  m.def("objective_gradient", &dstomo::objective_gradient, py::arg("zeta"), py::arg("w"));
  m.def(
      "refine_solution",
      [](double zeta, const std::array<double, 4>& w, double tol, int max_iters) {
        RefineOptions o;
        o.tol = tol;
        o.max_iters = max_iters;
        return refine_solution(zeta, w, o);
      },
      py::arg("zeta"), py::arg("w"), py::arg("tol") = 1e-12, py::arg("max_iters") = 10000);
  m.def(
      "search_tetrahedra",
      [](double zeta_min, double zeta_max, int n_starts, std::uint64_t seed, double tol) {
        SearchOptions o;
        o.zeta_min = zeta_min;
        o.zeta_max = zeta_max;
        o.n_starts = n_starts;
        o.seed = seed;
        o.tol = tol;
        return search_tetrahedra(o);
      },
      py::arg("zeta_min"), py::arg("zeta_max"), py::arg("n_starts") = 20000, py::arg("seed") = 0,
      py::arg("tol") = 1e-12);
  m.def("canonicalize", &dstomo::canonicalize, py::arg("solution"));
  m.def("is_reflection_symmetric", &dstomo::is_reflection_symmetric, py::arg("solution"),
        py::arg("tol") = 1e-6);
  m.def("balanced_delta", &dstomo::balanced_delta, py::arg("zeta"), py::arg("w1"), py::arg("w2"));
  m.def("detector_positions", &dstomo::detector_positions, py::arg("solution"), py::arg("delta"));
  m.def("make_layout", &dstomo::make_layout, py::arg("solution"), py::arg("delta"),
        py::arg("delta_xi") = 1e-3);
  m.def("build_povm", &dstomo::build_povm, py::arg("solution"), py::arg("delta"),
        py::arg("delta_xi") = 1e-3);
  m.def("gram_max_error", &dstomo::gram_max_error, py::arg("solution"));
  m.def("reference_design", &dstomo::reference_design, py::arg("delta_xi") = 1e-3);

  // tomo
  m.def(
      "ideal_probabilities",
      [](const std::array<double, 3>& r, const Povm4& povm) {
        return ideal_probabilities(BlochState{vec3_of(r)}, povm);
      },
      py::arg("r"), py::arg("povm"));
  m.def(
      "sample_positions",
      [](const std::array<double, 3>& r, const DetectorLayout& layout, std::size_t n,
         std::uint64_t seed) { return sample_positions(BlochState{vec3_of(r)}, layout, n, seed); },
      py::arg("r"), py::arg("layout"), py::arg("n"), py::arg("seed"));
  m.def("bin_counts", &dstomo::bin_counts, py::arg("positions"), py::arg("layout"));
  m.def(
      "simulate_counts",
      [](const std::array<double, 3>& r, const DetectorLayout& layout, std::uint64_t n_total,
         std::uint64_t seed) {
        return simulate_counts(BlochState{vec3_of(r)}, layout, n_total, seed);
      },
      py::arg("r"), py::arg("layout"), py::arg("n_total"), py::arg("seed"));
  m.def(
      "linear_invert",
      [](const std::array<double, 4>& p_hat, const Povm4& povm, bool artificial_balance) {
        return arr_of(linear_invert(p_hat, povm, artificial_balance).r_hat);
      },
      py::arg("p_hat"), py::arg("povm"), py::arg("artificial_balance") = false);
  m.def(
      "project_physical",
      [](const std::array<double, 3>& r) {
        const ProjectedState p = project_physical(vec3_of(r));
        return py::make_tuple(arr_of(p.state.r), p.projected);
      },
      py::arg("r"));
  m.def(
      "mle_reconstruct",
      [](const CountRecord& counts, const Povm4& povm, int max_iters, double tol) {
        return arr_of(mle_reconstruct(counts, povm, MleOptions{max_iters, tol}).r);
      },
      py::arg("counts"), py::arg("povm"), py::arg("max_iters") = 5000, py::arg("tol") = 1e-12);
  m.def(
      "fidelity",
      [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return fidelity(BlochState{vec3_of(a)}, BlochState{vec3_of(b)});
      },
      py::arg("r_a"), py::arg("r_b"));
  m.def(
      "trace_distance",
      [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return trace_distance(BlochState{vec3_of(a)}, BlochState{vec3_of(b)});
      },
      py::arg("r_a"), py::arg("r_b"));

  // labgeom
  m.def("to_physical", &dstomo::to_physical, py::arg("solution"), py::arg("delta"), py::arg("lambda_m"),
        py::arg("a_m"));
  m.def(
      "from_physical",
      [](const PhysicalGeometry& g) {
        const DimensionlessDesign d = from_physical(g);
        return py::make_tuple(d.delta, d.zeta, d.xi);
      },
      py::arg("geometry"));

#ifdef DSTOMO_VERSION
#define DSTOMO_STR2(x) #x
#define DSTOMO_STR(x) DSTOMO_STR2(x)
  m.attr("__version__") = DSTOMO_STR(DSTOMO_VERSION);
#else
  m.attr("__version__") = "dev";
#endif
}
