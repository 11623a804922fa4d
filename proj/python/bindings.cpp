#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsvfarm/commands.hpp"
#include "tsvfarm/design_io.hpp"
#include "tsvfarm/errors.hpp"
#include "tsvfarm/thermal_grid.hpp"

namespace py = pybind11;
using namespace tsvfarm;

namespace {

RunOptions make_options(std::uint64_t seed, int outer_iters, std::optional<double> grid_cell,
                        std::optional<double> leakage_lambda, std::optional<std::vector<double>> weights,
                        std::optional<double> preset_ratio, std::string out_dir) {
  RunOptions o;
  o.seed = seed;
  o.outer_iterations = outer_iters;
  o.grid_cell = grid_cell;
  o.leakage_lambda = leakage_lambda;
  o.preset_ratio = preset_ratio;
  o.out_dir = out_dir;
  if (weights) {
    if (weights->size() != 4) throw ConfigError("weights needs four values alpha, beta, gamma, delta");
    CostWeights w;
    w.alpha = (*weights)[0];
    w.beta = (*weights)[1];
    w.gamma = (*weights)[2];
    w.delta = (*weights)[3];
    o.weights = w;
  }
  return o;
}

py::dict summary_dict(const StateSummary& s) {
  return py::module_::import("json").attr("loads")(to_json(s).dump());
}

// Rows of the map for one layer, row 0 at the lowest y.
std::vector<std::vector<double>> layer_rows(const TemperatureField& f, int layer) {
  std::vector<std::vector<double>> rows(f.grid.cells_y, std::vector<double>(f.grid.cells_x));
  for (int j = 0; j < f.grid.cells_y; ++j)
    for (int i = 0; i < f.grid.cells_x; ++i) rows[j][i] = f.at(layer, j, i);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thermal-aware TSV farm placement";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Design>(m, "Design")
      .def_property_readonly("layer_count", [](const Design& d) { return d.stack.layer_count(); })
      .def_property_readonly("block_names",
                             [](const Design& d) {
                               std::vector<std::string> n;
                               for (const auto& b : d.floorplan.blocks) n.push_back(b.name);
                               return n;
                             })
      .def_property_readonly("farms",
                             [](const Design& d) {
                               py::list out;
                               for (const auto& f : d.floorplan.farms)
                                 out.append(py::dict(py::arg("name") = f.name, py::arg("x") = f.rect.x,
                                                     py::arg("y") = f.rect.y, py::arg("w") = f.rect.w,
                                                     py::arg("h") = f.rect.h, py::arg("start_layer") = f.start_layer,
                                                     py::arg("end_layer") = f.end_layer, py::arg("k_farm") = f.k_farm));
                               return out;
                             })
      .def("emit", &emit_design)
      .def("__eq__", [](const Design& a, const Design& b) { return a == b; });

  m.def("parse_design", &parse_design, py::arg("path"));
  m.def("parse_design_text", [](const std::string& text) { return parse_design_text(text); }, py::arg("text"));
  m.def("parse_length", [](const std::string& t) { return parse_length(t); });
  m.def("parse_temperature", [](const std::string& t) { return parse_temperature(t); });
  m.def("resistance", &resistance, py::arg("h"), py::arg("k"), py::arg("area"));
  m.def("acceptance_probability", &acceptance_probability, py::arg("delta"), py::arg("temperature"));

  m.def(
      "analyze",
      [](const Design& d, std::optional<double> grid_cell, std::optional<double> leakage_lambda, std::string out_dir) {
        const auto r = cmd_analyze(d, make_options(1, 1, grid_cell, leakage_lambda, std::nullopt, std::nullopt, out_dir));
        py::dict out = summary_dict(r.summary);
        py::list maps;
        for (int l = 0; l < r.field.grid.layers; ++l) maps.append(layer_rows(r.field, l));
        out["maps"] = maps;
        return out;
      },
      py::arg("design"), py::arg("grid_cell") = py::none(), py::arg("leakage_lambda") = py::none(),
      py::arg("out_dir") = "");

  m.def(
      "optimize",
      [](const Design& d, std::uint64_t seed, int outer_iters, std::optional<double> grid_cell,
         std::optional<double> leakage_lambda, std::optional<std::vector<double>> weights,
         std::optional<double> preset_ratio, std::string out_dir) {
        OptimizeResult r;
        {
          py::gil_scoped_release release;
          r = cmd_optimize(d, make_options(seed, outer_iters, grid_cell, leakage_lambda, weights, preset_ratio, out_dir));
        }
        return py::make_tuple(r.best, r.report.dump());
      },
      py::arg("design"), py::arg("seed") = 1, py::arg("outer_iters") = 3, py::arg("grid_cell") = py::none(),
      py::arg("leakage_lambda") = py::none(), py::arg("weights") = py::none(), py::arg("preset_ratio") = py::none(),
      py::arg("out_dir") = "");
}
