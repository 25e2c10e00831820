#include <fstream>

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sicmos/errors.hpp"
#include "sicmos/extraction.hpp"
#include "sicmos/model.hpp"
#include "sicmos/model_card.hpp"
#include "sicmos/sweep.hpp"
#include "sicmos/synthetic.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace sicmos;

namespace {

SweepSpec make_spec(SweepAxis axis, double start, double stop, int points, const std::string& scale,
                    std::vector<double> fixed_bias, double t_case, bool self_heating) {
    SweepSpec spec;
    spec.axis = axis;
    spec.start = start;
    spec.stop = stop;
    spec.points = points;
    if (scale == "linear") {
        spec.scale = GridScale::linear;
    } else if (scale == "log") {
        spec.scale = GridScale::log;
    } else {
        throw DomainError("scale must be 'linear' or 'log'");
    }
    spec.fixed_bias = std::move(fixed_bias);
    spec.t_case = t_case;
    spec.self_heating = self_heating;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SiC power MOSFET compact model";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NoBracket>(m, "NoBracket", base.ptr());
    py::register_exception<NonFinite>(m, "NonFinite", base.ptr());
    py::register_exception<SolverFailure>(m, "SolverFailure", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<UnitHeaderError>(m, "UnitHeaderError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::enum_<Region>(m, "Region")
        .value("linear_lowV", Region::linear_lowV)
        .value("output_midV", Region::output_midV)
        .value("high_power", Region::high_power);

    py::enum_<Weighting>(m, "Weighting")
        .value("relative", Weighting::relative)
        .value("log_current", Weighting::log_current);

    py::class_<ModelParams> params(m, "ModelParams");
    params.def(py::init<>())
        .def("validate", &ModelParams::validate)
        .def(py::self == py::self)
        .def("to_dict", [](const ModelParams& p) {
            py::dict d;
            for (const auto& info : param_table()) d[py::str(std::string(info.name))] = p.*(info.member);
            return d;
        })
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(vfb0=" + std::to_string(p.vfb0) + ", r_s=" + std::to_string(p.r_s) + ", ...)";
        });
    for (const auto& info : param_table()) {
        const auto member = info.member;
        params.def_property(
            std::string(info.name).c_str(), [member](const ModelParams& p) { return p.*member; },
            [member](ModelParams& p, double v) { p.*member = v; });
    }
    m.def("preset", [](const std::string& name) { return preset_card(name).params; }, "name"_a = std::string(kDut160Name));
    m.def("param_units", [] {
        py::dict d;
        for (const auto& info : param_table()) d[py::str(std::string(info.name))] = std::string(info.unit);
        return d;
    });

    py::class_<BiasSolution>(m, "BiasSolution")
        .def_readonly("id", &BiasSolution::id)
        .def_readonly("psi_p", &BiasSolution::psi_p)
        .def_readonly("q_src", &BiasSolution::q_src)
        .def_readonly("q_drn", &BiasSolution::q_drn)
        .def_readonly("vds_int", &BiasSolution::vds_int)
        .def_readonly("r_drift", &BiasSolution::r_drift)
        .def_readonly("t_j", &BiasSolution::t_j)
        .def_readonly("n_slope", &BiasSolution::n_slope)
        .def_readonly("converged", &BiasSolution::converged)
        .def_readonly("iterations", &BiasSolution::iterations);

    m.def(
        "solve_bias_point",
        [](const ModelParams& p, double vgs, double vds, double t_case, bool self_heating) {
            BiasOptions opts;
            opts.self_heating = self_heating;
            py::gil_scoped_release release;
            return solve_bias_point(p, {vgs, vds, t_case}, opts);
        },
        "params"_a, "vgs"_a, "vds"_a, "t_case"_a = 300.0, "self_heating"_a = true);
    m.def("on_resistance", [](const ModelParams& p, double vgs, double t_case) { return on_resistance(p, vgs, t_case); },
          "params"_a, "vgs"_a, "t_case"_a = 300.0);
    m.def("pinch_off_potential", [](const ModelParams& p, double vg, double t) { return pinch_off_potential(p, vg, t); },
          "params"_a, "vg"_a, "t"_a);
    m.def("drift_resistance", &drift_resistance, "params"_a, "i_ds"_a, "t"_a);

    py::class_<Curve>(m, "Curve")
        .def_readonly("label", &Curve::label)
        .def_readonly("fixed_bias", &Curve::fixed_bias)
        .def_readonly("x", &Curve::x)
        .def_readonly("y", &Curve::y)
        .def_property_readonly("converged", [](const Curve& c) {
            std::vector<bool> flags;
            for (const auto& meta : c.meta) flags.push_back(meta.converged);
            return flags;
        })
        .def_property_readonly("t_j", [](const Curve& c) {
            std::vector<double> t;
            for (const auto& meta : c.meta) t.push_back(meta.t_j);
            return t;
        });

    m.def(
        "output_sweep",
        [](const ModelParams& p, std::vector<double> vgs, double start, double stop, int points,
           const std::string& scale, double t_case, bool self_heating, unsigned threads) {
            const auto spec = make_spec(SweepAxis::vds, start, stop, points, scale, std::move(vgs), t_case, self_heating);
            py::gil_scoped_release release;
            return output_sweep(p, spec, {BiasOptions{}, threads});
        },
        "params"_a, "vgs"_a, "start"_a, "stop"_a, "points"_a, "scale"_a = "linear", "t_case"_a = 300.0,
        "self_heating"_a = true, "threads"_a = 0u);
    m.def(
        "transfer_sweep",
        [](const ModelParams& p, std::vector<double> vds, double start, double stop, int points,
           const std::string& scale, double t_case, bool self_heating, unsigned threads) {
            const auto spec = make_spec(SweepAxis::vgs, start, stop, points, scale, std::move(vds), t_case, self_heating);
            py::gil_scoped_release release;
            return transfer_sweep(p, spec, {BiasOptions{}, threads});
        },
        "params"_a, "vds"_a, "start"_a, "stop"_a, "points"_a, "scale"_a = "linear", "t_case"_a = 300.0,
        "self_heating"_a = true, "threads"_a = 0u);

    py::class_<MeasurementRecord>(m, "MeasurementRecord")
        .def_readonly("vgs", &MeasurementRecord::vgs)
        .def_readonly("vds", &MeasurementRecord::vds)
        .def_readonly("id", &MeasurementRecord::id)
        .def_readonly("t_case", &MeasurementRecord::t_case)
        .def_readonly("pulsed", &MeasurementRecord::pulsed)
        .def_readonly("source_tag", &MeasurementRecord::source_tag);

    py::class_<MeasurementSet>(m, "MeasurementSet")
        .def("__len__", &MeasurementSet::size)
        .def_readonly("records", &MeasurementSet::records)
        .def("indices", &MeasurementSet::indices, "region"_a)
        .def("save", [](const MeasurementSet& s, const std::filesystem::path& path) {
            std::ofstream out(path);
            if (!out) throw IoError("cannot write " + path.string());
            write_measurements(out, s);
        });

    m.def("load_measurements", py::overload_cast<const std::filesystem::path&>(&load_measurements), "path"_a);
    m.def(
        "synthesize",
        [](const ModelParams& p, double noise, std::uint64_t seed) {
            SyntheticPlan plan;
            plan.noise = noise;
            plan.seed = seed;
            py::gil_scoped_release release;
            return synthesize_full_plane(p, plan);
        },
        "params"_a, "noise"_a = 0.01, "seed"_a = SyntheticPlan{}.seed);
    m.def(
        "model_error",
        [](const ModelParams& p, const MeasurementSet& set, Weighting w) {
            py::gil_scoped_release release;
            return model_error(p, set, w);
        },
        "params"_a, "data"_a, "weighting"_a = Weighting::relative);

    py::class_<StageReport>(m, "StageReport")
        .def_readonly("name", &StageReport::name)
        .def_readonly("iterations", &StageReport::iterations)
        .def_readonly("start_error", &StageReport::start_error)
        .def_readonly("end_error", &StageReport::end_error)
        .def_readonly("trace", &StageReport::trace);

    py::class_<FitReport>(m, "FitReport")
        .def_readonly("initial_params", &FitReport::initial_params)
        .def_readonly("final_params", &FitReport::final_params)
        .def_readonly("per_stage", &FitReport::per_stage)
        .def_readonly("per_region_rms", &FitReport::per_region_rms)
        .def_readonly("overall_rms", &FitReport::overall_rms)
        .def_readonly("completed", &FitReport::completed)
        .def_readonly("failure", &FitReport::failure);

    m.def(
        "fit_all",
        [](const ModelParams& p0, const MeasurementSet& set, bool polish, int restarts, int max_iter) {
            FitOptions opts;
            opts.restarts = restarts;
            opts.max_iter = max_iter;
            py::gil_scoped_release release;
            return fit_all(p0, set, default_schedule(polish), opts);
        },
        "params0"_a, "data"_a, "polish"_a = true, "restarts"_a = FitOptions{}.restarts,
        "max_iter"_a = FitOptions{}.max_iter);

    m.def(
        "read_card",
        [](const std::filesystem::path& path) {
            const ModelCard card = read_card(path);
            return py::make_tuple(card.device_name, card.params, card.provenance);
        },
        "path"_a, "Returns (device_name, params, provenance).");
    m.def(
        "write_card",
        [](const std::filesystem::path& path, const ModelParams& p, const std::string& device_name,
           const std::map<std::string, std::string>& provenance) {
            write_card(path, ModelCard{kCardSchemaVersion, device_name, p, provenance});
        },
        "path"_a, "params"_a, "device_name"_a = std::string(kDut160Name),
        "provenance"_a = std::map<std::string, std::string>{});
}
