#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mubcert/certify.hpp"
#include "mubcert/counts.hpp"
#include "mubcert/error.hpp"
#include "mubcert/io.hpp"
#include "mubcert/mub.hpp"
#include "mubcert/photonics.hpp"
#include "mubcert/qrac.hpp"

namespace py = pybind11;
using namespace mubcert;

namespace {

// JSON crosses the boundary as text; the package wrapper decodes it.
std::string dumps(const nlohmann::json& j) { return j.dump(); }

InterferometerConfig config_from_text(const std::string& text) {
  return text.empty() ? InterferometerConfig{} : config_from_json(nlohmann::json::parse(text));
}

AspEstimate direct_estimate(double value, double sigma, int d) {
  AspEstimate e;
  e.value = value;
  e.sigma = sigma;
  e.dim = d;
  return e;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MUB certification from QRAC statistics";

  static py::exception<Error> error_type(m, "MubcertError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<Measurement>(m, "Measurement")
      .def_readonly("dim", &Measurement::dim)
      .def_readonly("effects", &Measurement::effects)
      .def_static("from_basis", &Measurement::from_basis, py::arg("columns"))
      .def("depolarized", &Measurement::depolarized, py::arg("visibility"));

  py::class_<MubPair>(m, "MubPair")
      .def(py::init([](const Measurement& a, const Measurement& b) {
             return MubPair{a, b, Construction::Custom};
           }),
           py::arg("first"), py::arg("second"))
      .def_readonly("first", &MubPair::first)
      .def_readonly("second", &MubPair::second)
      .def_property_readonly("dim", &MubPair::dim)
      .def_property_readonly("construction", [](const MubPair& p) { return to_string(p.construction); });

  m.def("paper_mub_pair_d4", &paper_mub_pair_d4);
  m.def("fourier_mub_pair", &fourier_mub_pair, py::arg("d"));
  m.def("is_mutually_unbiased", [](const MubPair& p) { return is_mutually_unbiased(p); }, py::arg("pair"));
  m.def("overlap_entropy", &overlap_entropy, py::arg("pair"));
  m.def("norm_sum", &norm_sum, py::arg("measurement"));
  m.def("s_max", &s_max, py::arg("pair"));
  m.def("_mub_metrics", [](const MubPair& p) { return dumps(mub_metrics(p)); });

  m.def("optimal_states", [](const MubPair& p) { return optimal_states(p).states; }, py::arg("pair"),
        "The d*d optimal encoding states, row-major in (i, j).");
  m.def("asp", [](const std::vector<CVector>& states, const MubPair& p) {
          return asp(EncodingTable{p.dim(), states}, p);
        }, py::arg("states"), py::arg("pair"));
  m.def("asp_mixed", [](const std::vector<CMatrix>& rhos, const MubPair& p) { return asp(rhos, p); },
        py::arg("rhos"), py::arg("pair"));
  m.def("brute_force_optimal_asp", [](const MubPair& p) { return brute_force_optimal_asp(p).value; },
        py::arg("pair"));
  m.def("quantum_optimum", &quantum_optimum, py::arg("d"));

  m.def("bound_overlap_entropy", &bound_overlap_entropy, py::arg("p"), py::arg("d"));
  m.def("bound_norm_sum", &bound_norm_sum, py::arg("p"), py::arg("d"));
  m.def("norm_sum_threshold", &norm_sum_threshold, py::arg("d"));
  m.def("bound_smax", &bound_smax, py::arg("p"), py::arg("d"));
  m.def("bound_incompatibility", &bound_incompatibility, py::arg("norm_lower"), py::arg("smax_upper"), py::arg("d"));
  m.def("bound_entropic", &bound_entropic, py::arg("p"), py::arg("d"));
  m.def("min_asp_for_nontrivial_eta", &min_asp_for_nontrivial_eta, py::arg("d"));
  m.def("_certify", [](double value, double sigma, int d) {
          return dumps(to_json(full_certificate(direct_estimate(value, sigma, d), d)));
        }, py::arg("asp"), py::arg("sigma"), py::arg("d"));
  m.def("_certify_counts", [](const std::string& csv) {
          const auto counts = parse_counts_csv(csv);
          return dumps(to_json(full_certificate(estimate_asp(counts), counts.dim())));
        }, py::arg("csv"));
  m.def("estimate_asp", [](const std::string& csv) {
          const auto e = estimate_asp(parse_counts_csv(csv));
          return py::make_tuple(e.value, e.sigma, e.n_rounds);
        }, py::arg("csv"), "Returns (asp, sigma, detections) for counts in CSV form.");

  m.def("simulate_counts_csv", [](std::uint64_t rounds, std::uint64_t seed, const std::string& config, unsigned threads) {
          py::gil_scoped_release release;
          return counts_to_csv(simulate_rounds(config_from_text(config), rounds, seed, threads));
        }, py::arg("rounds"), py::arg("seed"), py::arg("config") = "", py::arg("threads") = 0);
  m.def("rounds_for_detections", [](std::uint64_t detections, const std::string& config) {
          return rounds_for_detections(config_from_text(config), detections);
        }, py::arg("detections"), py::arg("config") = "");
  m.def("ideal_counts_csv", [](std::uint64_t detections) { return counts_to_csv(ideal_counts(detections)); },
        py::arg("detections"));
  m.def("mean_fringe_visibility", [](const std::string& config, std::uint64_t seed) {
          return mean_fringe_visibility(config_from_text(config), seed);
        }, py::arg("config"), py::arg("seed") = 0);
  m.def("calibrate_noise_sigma", [](const std::string& config, double target, std::uint64_t seed) {
          return calibrate_noise_sigma(config_from_text(config), target, seed);
        }, py::arg("config"), py::arg("target_visibility"), py::arg("seed") = 0);
  m.def("mbs_matrix", &mbs_matrix);
  m.def("measurement_unitary", &measurement_unitary, py::arg("phi_b"));
  m.def("detection_probabilities", &detection_probabilities, py::arg("state"), py::arg("phi_b"));
}
