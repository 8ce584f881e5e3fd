#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "potlab/capacity.hpp"
#include "potlab/errors.hpp"
#include "potlab/experiments.hpp"
#include "potlab/leja.hpp"

namespace py = pybind11;
using namespace potlab;

namespace {

// JSON crosses the boundary as text; the Python wrapper decodes it.
py::tuple run(const std::string& name, const std::string& config_json) {
    ExperimentConfig cfg = ExperimentConfig::defaults(experiment_from_name(name));
    try {
        apply_config(cfg, nlohmann::json::parse(config_json));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentReport rep;
    {
        py::gil_scoped_release release;
        rep = run_experiment(cfg);
    }
    return py::make_tuple(dump_json(rep.summary), rep.files);
}

std::vector<double> leja_points(size_t n, const std::string& target, double alpha, unsigned bits, size_t grid) {
    PrecisionContext ctx(bits);
    const CandidateGrid g = CandidateGrid::chebyshev(grid);
    const LejaSequence s = target.empty() ? leja_unweighted(n, g) : leja_weighted(target_by_name(target, alpha), n, g);
    std::vector<double> out;
    for (const Real& x : s.points) out.push_back(x.to_double());
    return out;
}

std::string capacity(const std::string& region_json, size_t n) {
    const RegionDescriptor r = parse_region(nlohmann::json::parse(region_json));
    return dump_json(capacity_report(r, n).to_json());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    auto base = py::register_exception<Error>(m, "PotlabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<PairingFailure>(m, "PairingFailure", base.ptr());
    py::register_exception<StressFailure>(m, "StressFailure", base.ptr());

    m.def("run_experiment", &run, py::arg("name"), py::arg("config_json"));
    m.def("leja_points", &leja_points, py::arg("n"), py::arg("target") = "", py::arg("alpha") = 0.5,
          py::arg("bits") = 128, py::arg("grid") = CandidateGrid::kDefaultSize);
    m.def("capacity", &capacity, py::arg("region_json"), py::arg("n") = 64);
    m.def("circle_potential_gap", &circle_potential_gap, py::arg("n"), py::arg("z"));
    m.def("segment_potential_gap", &segment_potential_gap, py::arg("n"), py::arg("z"));
}
