#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bgkimex/broadwell.hpp"
#include "bgkimex/experiments.hpp"
#include "bgkimex/problems.hpp"
#include "bgkimex/stability.hpp"

namespace py = pybind11;
using namespace bgkimex;

namespace {

std::vector<double> as_vector(const py::array_t<double, py::array::c_style>& a) {
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict positivity_dict(const PositivityReport& rep) {
  py::dict d;
  d["kind"] = to_string(rep.kind);
  d["feasible"] = rep.feasible;
  d["c_sch"] = rep.c_sch ? py::object(py::float_(*rep.c_sch)) : py::object(py::none());
  d["convexity_defect"] = rep.convexity_defect;
  py::dict coeffs;
  for (const auto& c : rep.coefficients) coeffs[py::str(c.label)] = c.value;
  d["coefficients"] = coeffs;
  d["violations"] = rep.violations;
  return d;
}

TableauPair scheme_from(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return get_scheme(obj.cast<std::string>());
  return obj.cast<TableauPair>();
}

}  // namespace

PYBIND11_MODULE(_bgkimex, m) {
  m.doc() = "IMEX solvers for the stiff BGK equation with positivity and AP guarantees";

  py::register_exception<TableauError>(m, "TableauError", PyExc_ValueError);
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<TableauPair>(m, "TableauPair")
      .def(py::init<>())
      .def_readwrite("nu", &TableauPair::nu)
      .def_readwrite("a_explicit", &TableauPair::a_explicit)
      .def_readwrite("a_implicit", &TableauPair::a_implicit)
      .def_readwrite("w_explicit", &TableauPair::w_explicit)
      .def_readwrite("w_implicit", &TableauPair::w_implicit)
      .def_readwrite("alpha", &TableauPair::alpha)
      .def_readwrite("gsa", &TableauPair::gsa)
      .def_readwrite("name", &TableauPair::name)
      .def_property(
          "kind", [](const TableauPair& t) { return to_string(t.kind); },
          [](TableauPair& t, const std::string& s) { t.kind = scheme_kind_from_string(s); })
      .def("validate", &TableauPair::validate)
      .def("c_explicit", &TableauPair::c_explicit)
      .def("c_implicit", &TableauPair::c_implicit)
      .def("__repr__", [](const TableauPair& t) {
        return "<TableauPair " + t.name + " (" + std::to_string(t.nu) + " stages, type " +
               to_string(t.kind) + ")>";
      });

  m.def("builtin_scheme_names", [] {
    std::vector<std::string> names;
    for (const auto& [k, v] : builtin_schemes()) names.push_back(k);
    return names;
  });
  m.def("get_scheme", &get_scheme, py::arg("name"));
  m.def("tableau_from_json", &tableau_from_json_text, py::arg("text"));
  m.def("tableau_to_json", &tableau_to_json_text, py::arg("tableau"));

  m.def(
      "check_order_conditions",
      [](const py::object& scheme, int order, const std::string& variant) {
        const auto conds = check_order_conditions(
            scheme_from(scheme), order,
            variant == "fnp1" ? CorrectionVariant::FStarFnp1 : CorrectionVariant::FStarFn);
        py::list out;
        for (const auto& c : conds) {
          py::dict d;
          d["name"] = c.name;
          d["order"] = c.order;
          d["value"] = c.value;
          d["target"] = c.target;
          d["residual"] = c.residual;
          out.append(d);
        }
        return out;
      },
      py::arg("scheme"), py::arg("order") = 2, py::arg("variant") = "fn");

  m.def(
      "positivity_analysis",
      [](const py::object& scheme) { return positivity_dict(positivity_analysis(scheme_from(scheme))); },
      py::arg("scheme"));

  m.def(
      "amplification_factor",
      [](const py::object& scheme, std::complex<double> z1, double z2) {
        return amplification_factor(scheme_from(scheme), z1, z2);
      },
      py::arg("scheme"), py::arg("z1"), py::arg("z2"));

  m.def(
      "stability_boundary",
      [](const py::object& scheme, double z2, std::array<double, 4> window, int resolution) {
        const auto slice = stability_boundary_slice(
            scheme_from(scheme), z2, Window{window[0], window[1], window[2], window[3]},
            resolution);
        py::array_t<double> out(std::vector<py::ssize_t>{
            static_cast<py::ssize_t>(slice.boundary.size()), static_cast<py::ssize_t>(2)});
        auto r = out.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          r(i, 0) = slice.boundary[i].first;
          r(i, 1) = slice.boundary[i].second;
        }
        return out;
      },
      py::arg("scheme"), py::arg("z2"), py::arg("window") = std::array<double, 4>{-6, 1, -5, 5},
      py::arg("resolution") = 400);

  py::class_<VelocityGrid>(m, "VelocityGrid")
      .def(py::init<double, int>(), py::arg("v_max") = 15.0, py::arg("n_v") = 150)
      .def_readonly("v_max", &VelocityGrid::v_max)
      .def_readonly("n_v", &VelocityGrid::n_v)
      .def_readonly("dv", &VelocityGrid::dv)
      .def_property_readonly("nodes",
                             [](const VelocityGrid& g) { return as_array(g.nodes); });

  m.def(
      "moments",
      [](const py::array_t<double, py::array::c_style>& f, const VelocityGrid& grid) {
        const auto U = moments(as_vector(f), grid);
        return py::make_tuple(U.rho, U.m, U.E);
      },
      py::arg("f"), py::arg("grid"));

  m.def(
      "maxwellian",
      [](double rho, double u, double T, const VelocityGrid& grid) {
        return as_array(maxwellian({rho, u, T}, grid));
      },
      py::arg("rho"), py::arg("u"), py::arg("T"), py::arg("grid"));

  m.def(
      "discrete_maxwellian",
      [](double rho, double momentum, double E, const VelocityGrid& grid) {
        return as_array(discrete_maxwellian({rho, momentum, E}, grid));
      },
      py::arg("rho"), py::arg("m"), py::arg("E"), py::arg("grid"));

  m.def(
      "bgk_relax",
      [](const py::array_t<double, py::array::c_style>& f,
         const py::array_t<double, py::array::c_style>& M, double b) {
        return as_array(bgk_relax(as_vector(f), as_vector(M), b));
      },
      py::arg("f_star"), py::arg("M"), py::arg("b"));

  m.def(
      "collision_bgk",
      [](const py::array_t<double, py::array::c_style>& f, const VelocityGrid& grid) {
        return as_array(collision_bgk(as_vector(f), grid));
      },
      py::arg("f"), py::arg("grid"));

  m.def(
      "positivity_limit_interfaces",
      [](double fbar, double f_plus_left, double f_minus_right) {
        const auto lim = positivity_limit_interfaces(fbar, f_plus_left, f_minus_right);
        return py::make_tuple(lim.plus_left, lim.minus_right, lim.theta);
      },
      py::arg("fbar"), py::arg("f_plus_left"), py::arg("f_minus_right"));

  m.def(
      "advect_row",
      [](const py::array_t<double, py::array::c_style>& row, double v, double dt, double x_lo,
         double x_hi, bool limiter, bool linear_weights) {
        const auto in = as_vector(row);
        const SpatialMesh mesh(static_cast<int>(in.size()), x_lo, x_hi);
        TransportConfig cfg;
        cfg.limiter = limiter;
        cfg.weights = linear_weights ? Weno5Weights::Linear : Weno5Weights::Nonlinear;
        RowWorkspace ws;
        std::vector<double> out(in.size());
        const auto res = transport_forward_euler(in, v, dt, mesh, {}, cfg, ws, out);
        return py::make_tuple(as_array(out), res.cfl_exceeded);
      },
      py::arg("row"), py::arg("v"), py::arg("dt"), py::arg("x_lo") = 0.0, py::arg("x_hi") = 2.0,
      py::arg("limiter") = true, py::arg("linear_weights") = false,
      "One forward Euler transport step of a periodic row; returns (row, cfl_exceeded)");

  m.def(
      "run_bgk",
      [](const py::object& scheme, double eps, int nx, int nv, double vmax, double t_end,
         const std::string& init, const std::string& spatial, bool strict, bool mixed_eps,
         double cfl_fraction, int threads) {
        const SpatialMesh mesh(nx, 0.0, 2.0,
                               init == "sod" ? BoundaryMode::DirichletGhost
                                             : BoundaryMode::Periodic);
        const VelocityGrid grid(vmax, nv);
        SimConfig cfg;
        cfg.scheme = scheme_from(scheme);
        cfg.eps = eps;
        if (mixed_eps) cfg.eps_fn = problems::mixed_regime_eps;
        cfg.spatial = spatial == "upwind" ? SpatialScheme::Upwind1
                      : spatial == "weno_unlimited" ? SpatialScheme::Weno5Unlimited
                                                    : SpatialScheme::Weno5Limited;
        cfg.positivity_strict = strict;
        cfg.track_entropy = strict;
        cfg.track_equilibrium_distance = true;
        cfg.threads = threads;
        ImexStepper stepper(cfg, mesh, grid);
        KineticField f = init == "sod"          ? problems::sod(mesh, grid)
                         : init == "consistent" ? problems::smooth_consistent(mesh, grid)
                                                : problems::smooth_inconsistent(mesh, grid);
        if (mesh.boundary == BoundaryMode::DirichletGhost) stepper.freeze_boundary(f);
        const double dt = cfl_fraction * (cfg.spatial == SpatialScheme::Upwind1
                                              ? stepper.upwind_dt()
                                              : stepper.positivity_dt());
        const auto summary = run(stepper, f, t_end, dt);

        const auto snap = experiments::snapshot_of(f);
        py::dict out;
        out["x"] = as_array(snap.x);
        out["rho"] = as_array(snap.rho);
        out["u"] = as_array(snap.u);
        out["T"] = as_array(snap.T);
        out["steps"] = summary.steps;
        std::vector<double> time, mass, mom, energy, entropy, dist, min_f;
        std::vector<int> negs;
        for (const auto& d : summary.diagnostics) {
          time.push_back(d.time);
          mass.push_back(d.mass);
          mom.push_back(d.momentum);
          energy.push_back(d.energy);
          entropy.push_back(d.entropy);
          dist.push_back(d.max_distance_to_equilibrium);
          min_f.push_back(d.min_value);
          negs.push_back(d.negative_cell_count);
        }
        out["time"] = as_array(time);
        out["mass"] = as_array(mass);
        out["momentum"] = as_array(mom);
        out["energy"] = as_array(energy);
        out["entropy"] = as_array(entropy);
        out["max_distance_to_equilibrium"] = as_array(dist);
        out["min_f"] = as_array(min_f);
        out["neg_cells"] = negs;
        return out;
      },
      py::arg("scheme") = "scheme_a", py::arg("eps") = 1.0, py::arg("nx") = 40,
      py::arg("nv") = 150, py::arg("vmax") = 15.0, py::arg("t_end") = 0.05,
      py::arg("init") = "inconsistent", py::arg("spatial") = "weno", py::arg("strict") = true,
      py::arg("mixed_eps") = false, py::arg("cfl_fraction") = 1.0, py::arg("threads") = 1,
      "Run the corrected IMEX-RK BGK solver; returns final macroscopic fields and "
      "per-step diagnostics");

  m.def(
      "accuracy_case",
      [](const py::object& scheme, double eps, const std::vector<int>& nx_list,
         const std::string& init, int nv, double vmax, int threads) {
        const auto res = experiments::accuracy_case(
            scheme_from(scheme), eps, nx_list,
            init == "consistent" ? experiments::InitKind::Consistent
                                 : experiments::InitKind::Inconsistent,
            nv, vmax, threads);
        py::list out;
        for (const auto& pt : res.points)
          out.append(py::make_tuple(pt.nx, pt.error, pt.order));
        return out;
      },
      py::arg("scheme"), py::arg("eps"), py::arg("nx_list"), py::arg("init") = "inconsistent",
      py::arg("nv") = 150, py::arg("vmax") = 15.0, py::arg("threads") = 1);

  m.def(
      "broadwell_collision",
      [](double fp, double f0, double fm) {
        const auto q = broadwell_collision({fp, f0, fm});
        return py::make_tuple(q.fp, q.f0, q.fm);
      },
      py::arg("f_plus"), py::arg("f_zero"), py::arg("f_minus"));

  m.def(
      "broadwell_relax",
      [](double fp, double f0, double fm, double b) {
        const auto f = broadwell_relax({fp, f0, fm}, b);
        return py::make_tuple(f.fp, f.f0, f.fm);
      },
      py::arg("f_plus"), py::arg("f_zero"), py::arg("f_minus"), py::arg("b"));

  m.def(
      "broadwell_moments",
      [](double fp, double f0, double fm) {
        const auto u = broadwell_moments({fp, f0, fm});
        return py::make_tuple(u.rho, u.m, u.z);
      },
      py::arg("f_plus"), py::arg("f_zero"), py::arg("f_minus"));
}
