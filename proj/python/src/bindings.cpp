#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <cstring>

#include "chemoflux/cole_hopf.hpp"
#include "chemoflux/config.hpp"
#include "chemoflux/diagnostics.hpp"
#include "chemoflux/evolve.hpp"
#include "chemoflux/init_data.hpp"
#include "chemoflux/spectral.hpp"
#include "chemoflux/studies.hpp"

namespace py = pybind11;
using namespace chemoflux;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Array& a, double L) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square 2D array");
  const Grid grid(L, static_cast<std::size_t>(a.shape(0)));
  std::vector<double> samples(a.data(), a.data() + a.size());
  return ScalarField(grid, std::move(samples));
}

VectorField to_vector(const Array& x, const Array& y, double L) { return {to_field(x, L), to_field(y, L)}; }

Array to_array(const ScalarField& f) {
  const auto n = static_cast<py::ssize_t>(f.grid().resolution());
  Array out({n, n});
  std::memcpy(out.mutable_data(), f.samples().data(), f.size() * sizeof(double));
  return out;
}

py::tuple to_tuple(const VectorField& w) { return py::make_tuple(to_array(w.x()), to_array(w.y())); }

py::dict records_to_columns(const std::vector<DiagnosticsRecord>& records) {
  py::dict out;
  const auto names = diagnostics_columns();
  for (std::size_t c = 0; c < names.size(); ++c) {
    Array col(static_cast<py::ssize_t>(records.size()));
    auto* p = col.mutable_data();
    for (std::size_t i = 0; i < records.size(); ++i) p[i] = record_values(records[i])[c];
    out[py::str(std::string(names[c]))] = col;
  }
  return out;
}

py::dict fit_to_dict(const DecayFit& f) {
  py::dict d;
  d["quantity"] = f.quantity;
  d["t_lo"] = f.t_lo;
  d["t_hi"] = f.t_hi;
  d["rate"] = f.rate;
  d["prefactor"] = f.prefactor;
  d["residual"] = f.residual;
  d["samples"] = f.samples;
  return d;
}

py::dict summary_to_dict(const DataSummary& s) {
  py::dict d;
  d["theta0"] = s.theta0;
  d["M"] = s.M;
  d["linf_amplitude"] = s.linf_amplitude;
  d["delta"] = s.delta;
  d["eta0"] = s.eta0;
  return d;
}

}  // namespace

PYBIND11_MODULE(_chemoflux, m) {
  m.doc() = "Spectral solver for the Cole-Hopf transformed chemotaxis system";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NegativeDensityError>(m, "NegativeDensityError", PyExc_ValueError);
  py::register_exception<ChemicalFloorError>(m, "ChemicalFloorError", PyExc_ArithmeticError);

  py::enum_<Scheme>(m, "Scheme").value("imex_be", Scheme::imex_be).value("imex_cn", Scheme::imex_cn);

  m.def("gradient", [](const Array& f, double L) { return to_tuple(gradient(to_field(f, L))); }, py::arg("f"),
        py::arg("L"));
  m.def("divergence", [](const Array& wx, const Array& wy, double L) { return to_array(divergence(to_vector(wx, wy, L))); },
        py::arg("wx"), py::arg("wy"), py::arg("L"));
  m.def("curl2d", [](const Array& wx, const Array& wy, double L) { return to_array(curl2d(to_vector(wx, wy, L))); },
        py::arg("wx"), py::arg("wy"), py::arg("L"));
  m.def("laplacian", [](const Array& f, double L) { return to_array(laplacian(to_field(f, L))); }, py::arg("f"),
        py::arg("L"));
  m.def("helmholtz_solve", [](const Array& f, double L, double a) { return to_array(helmholtz_solve(to_field(f, L), a)); },
        py::arg("f"), py::arg("L"), py::arg("a"));
  m.def("lp_norm", [](const Array& f, double L, double p) { return lp_norm(to_field(f, L), p); }, py::arg("f"),
        py::arg("L"), py::arg("p"), "p = math.inf gives the max norm");

  m.def("mollify", [](const Array& f, double L, double delta) { return to_array(mollify(to_field(f, L), delta)); },
        py::arg("f"), py::arg("L"), py::arg("delta"));
  m.def("project_curl_free",
        [](const Array& wx, const Array& wy, double L) { return to_tuple(project_curl_free(to_vector(wx, wy, L))); },
        py::arg("wx"), py::arg("wy"), py::arg("L"));
  m.def("compute_eta0", &compute_eta0, py::arg("p0"));

  m.def("forward_transform",
        [](const Array& c, double L, double mu) {
          return to_tuple(forward_transform(to_field(c, L), ChemistryParams::from_mu_xi(mu, 1.0 / mu)));
        },
        py::arg("c"), py::arg("L"), py::arg("mu") = 1.0);
  m.def("c_step",
        [](const Array& c, const Array& u, double L, double mu, double dt) {
          return to_array(c_step(to_field(c, L), to_field(u, L), mu, dt));
        },
        py::arg("c"), py::arg("u"), py::arg("L"), py::arg("mu"), py::arg("dt"));

  m.def("effective_flux",
        [](const Array& u, const Array& vx, const Array& vy, double L, double chi) {
          return to_tuple(effective_flux(to_field(u, L), to_vector(vx, vy, L), chi));
        },
        py::arg("u"), py::arg("vx"), py::arg("vy"), py::arg("L"), py::arg("chi") = 1.0);
  m.def("assemble_ut",
        [](const Array& u, const Array& vx, const Array& vy, double L, double chi) {
          return to_array(assemble_ut(to_field(u, L), to_vector(vx, vy, L), chi));
        },
        py::arg("u"), py::arg("vx"), py::arg("vy"), py::arg("L"), py::arg("chi") = 1.0);
  m.def("flux_divergence_residual",
        [](const Array& u, const Array& vx, const Array& vy, double L, double chi) {
          const auto uf = to_field(u, L);
          const auto v = to_vector(vx, vy, L);
          return flux_divergence_residual(uf, v, chi, assemble_ut(uf, v, chi));
        },
        py::arg("u"), py::arg("vx"), py::arg("vy"), py::arg("L"), py::arg("chi") = 1.0);
  m.def("curl_flux_residual",
        [](const Array& u, const Array& vx, const Array& vy, double L, double chi) {
          return curl_flux_residual(to_field(u, L), to_vector(vx, vy, L), chi);
        },
        py::arg("u"), py::arg("vx"), py::arg("vy"), py::arg("L"), py::arg("chi") = 1.0);

  m.def("step_transformed",
        [](const Array& u, const Array& vx, const Array& vy, double L, double dt, Scheme scheme, double mu, double xi) {
          const auto s = SimState::transformed(0.0, to_field(u, L), to_vector(vx, vy, L));
          const auto next = step_transformed(s, dt, scheme, ChemistryParams::from_mu_xi(mu, xi));
          return py::make_tuple(to_array(next.u), to_array(next.v().x()), to_array(next.v().y()));
        },
        py::arg("u"), py::arg("vx"), py::arg("vy"), py::arg("L"), py::arg("dt"), py::arg("scheme") = Scheme::imex_cn,
        py::arg("mu") = 1.0, py::arg("xi") = 1.0);
  m.def("step_original",
        [](const Array& u, const Array& c, double L, double dt, Scheme scheme, double mu, double xi) {
          const auto s = SimState::original(0.0, to_field(u, L), to_field(c, L));
          const auto next = step_original(s, dt, scheme, ChemistryParams::from_mu_xi(mu, xi));
          return py::make_tuple(to_array(next.u), to_array(next.c()));
        },
        py::arg("u"), py::arg("c"), py::arg("L"), py::arg("dt"), py::arg("scheme") = Scheme::imex_cn,
        py::arg("mu") = 1.0, py::arg("xi") = 1.0);

  m.def("fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi) {
          return fit_to_dict(fit_decay(t, y, t_lo, t_hi));
        },
        py::arg("t"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

  m.def("apply_config",
        [](const std::string& text) {
          const auto cfg = parse_config(text);
          py::dict d;
          d["study"] = to_string(cfg.study);
          d["L"] = cfg.side_length;
          d["N"] = cfg.resolution;
          d["t_end"] = cfg.stepper.t_end;
          d["chi"] = cfg.params.chi();
          return d;
        },
        py::arg("text"), "Parse and validate a config; returns its main fields.");

  m.def("initial_data",
        [](const std::string& text) {
          const auto cfg = parse_config(text);
          const auto prepared = prepare_run(cfg, cfg.grid());
          py::dict d;
          d["u0"] = to_array(prepared.data.u0);
          d["v0"] = to_tuple(prepared.data.v0);
          d["c0"] = to_array(prepared.c0);
          d["summary"] = summary_to_dict(prepared.data.summary);
          return d;
        },
        py::arg("text"), "Initial data described by a config text.");

  m.def("run_config",
        [](const std::string& text) {
          const auto cfg = parse_config(text);
          SingleRunResult result = [&] {
            py::gil_scoped_release release;
            return run_single(cfg);
          }();
          py::dict d;
          d["status"] = to_string(result.trajectory.outcome.status);
          d["exit_code"] = exit_code(result.trajectory.outcome.status);
          d["t_final"] = result.trajectory.outcome.t;
          d["steps"] = result.trajectory.steps;
          d["records"] = records_to_columns(result.trajectory.records);
          d["summary"] = summary_to_dict(result.summary);
          py::list fits;
          for (const auto& f : result.fits) fits.append(fit_to_dict(f));
          d["fits"] = fits;
          const auto& s = result.trajectory.final_state;
          d["u"] = to_array(s.u);
          if (s.mode() == Mode::transformed) d["v"] = to_tuple(s.v());
          else d["c"] = to_array(s.c());
          return d;
        },
        py::arg("text"), "Run a single simulation described by a config text.");

  m.def("run_study",
        [](const std::string& text, const std::filesystem::path& out_dir, int threads) {
          const auto cfg = parse_config(text);
          py::gil_scoped_release release;
          return run_study(cfg, out_dir, text, threads);
        },
        py::arg("text"), py::arg("out_dir"), py::arg("threads") = 1,
        "Run the configured study, write its artifacts, return the exit code.");
}
