// pybind11 module exposing the main solitonlab operations with numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "solitonlab/backlund.hpp"
#include "solitonlab/collision.hpp"
#include "solitonlab/experiments.hpp"
#include "solitonlab/modulation.hpp"
#include "solitonlab/profiles.hpp"
#include "solitonlab/solver.hpp"
#include "solitonlab/spectral.hpp"

namespace py = pybind11;
using namespace slab;

namespace {

py::array_t<double> to_numpy(const Field& f) {
    py::array_t<double> out(static_cast<py::ssize_t>(f.v.size()));
    std::copy(f.v.begin(), f.v.end(), out.mutable_data());
    return out;
}

py::array_t<cplx> to_numpy(const CField& f) {
    py::array_t<cplx> out(static_cast<py::ssize_t>(f.v.size()));
    std::copy(f.v.begin(), f.v.end(), out.mutable_data());
    return out;
}

Field from_numpy(const GridSpec& g, py::array_t<double, py::array::c_style> a,
                 double time = 0.0) {
    if (a.size() != g.n)
        throw Error("array length does not match the grid");
    Field f(g);
    f.time = time;
    std::copy(a.data(), a.data() + g.n, f.v.begin());
    return f;
}

}  // namespace

PYBIND11_MODULE(_solitonlab, m) {
    m.doc() = "gKdV/mKdV soliton and breather laboratory (C++ core)";

    py::register_exception<Error>(m, "SolitonlabError");

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double length, int n) {
                 GridSpec g{length, n};
                 g.validate();
                 return g;
             }),
             py::arg("length"), py::arg("n"))
        .def_readonly("length", &GridSpec::length)
        .def_readonly("n", &GridSpec::n)
        .def_property_readonly("spacing", &GridSpec::spacing)
        .def("points", [](const GridSpec& g) {
            py::array_t<double> out(g.n);
            auto* p = out.mutable_data();
            for (int i = 0; i < g.n; ++i) p[i] = g.x(i);
            return out;
        });

    py::class_<SolitonParams>(m, "SolitonParams")
        .def(py::init([](int p, double c, double x0) {
                 SolitonParams prm{p, c, x0};
                 prm.validate();
                 return prm;
             }),
             py::arg("p"), py::arg("c") = 1.0, py::arg("x0") = 0.0)
        .def_readwrite("p", &SolitonParams::p)
        .def_readwrite("c", &SolitonParams::c)
        .def_readwrite("x0", &SolitonParams::x0);

    py::class_<BreatherParams>(m, "BreatherParams")
        .def(py::init([](double alpha, double beta, double x1, double x2) {
                 BreatherParams prm{alpha, beta, x1, x2};
                 prm.validate();
                 return prm;
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("x1") = 0.0,
             py::arg("x2") = 0.0)
        .def_readwrite("alpha", &BreatherParams::alpha)
        .def_readwrite("beta", &BreatherParams::beta)
        .def_readwrite("x1", &BreatherParams::x1)
        .def_readwrite("x2", &BreatherParams::x2)
        .def_property_readonly("delta", &BreatherParams::delta)
        .def_property_readonly("gamma", &BreatherParams::gamma);

    // profiles
    m.def("soliton_profile",
          [](const SolitonParams& prm, const GridSpec& g) {
              return to_numpy(soliton_profile(prm, g));
          },
          py::arg("params"), py::arg("grid"));
    m.def("scaling_direction",
          [](const SolitonParams& prm, const GridSpec& g) {
              return to_numpy(scaling_direction(prm, g));
          },
          py::arg("params"), py::arg("grid"));
    m.def("breather_profile",
          [](const BreatherParams& prm, double t, const GridSpec& g) {
              return to_numpy(breather_profile(prm, t, g));
          },
          py::arg("params"), py::arg("t"), py::arg("grid"));
    m.def("breather_directions",
          [](const BreatherParams& prm, double t, const GridSpec& g) {
              const BreatherDirections d = breather_directions(prm, t, g);
              return py::make_tuple(to_numpy(d.B1), to_numpy(d.B2),
                                    to_numpy(d.Btilde_t));
          },
          py::arg("params"), py::arg("t"), py::arg("grid"));
    m.def("complex_soliton",
          [](const BreatherParams& prm, const GridSpec& g, double eps_sing) {
              const ComplexSoliton cs = complex_soliton(prm, g, eps_sing);
              return py::make_tuple(to_numpy(cs.Qtilde), to_numpy(cs.Q),
                                    to_numpy(cs.Qtilde_t));
          },
          py::arg("params"), py::arg("grid"), py::arg("eps_sing") = 1e-3);

    // grid calculus
    m.def("spectral_derivative",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             int order) {
              return to_numpy(spectral_derivative(from_numpy(g, u), order));
          },
          py::arg("grid"), py::arg("u"), py::arg("order") = 1);
    m.def("sobolev_norm",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             double s) { return sobolev_norm(from_numpy(g, u), s); },
          py::arg("grid"), py::arg("u"), py::arg("s") = 0.0);
    m.def("inner_product",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             py::array_t<double, py::array::c_style> v) {
              return inner_product(from_numpy(g, u), from_numpy(g, v));
          },
          py::arg("grid"), py::arg("u"), py::arg("v"));
    m.def("antiderivative",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u) {
              return to_numpy(antiderivative(from_numpy(g, u)));
          },
          py::arg("grid"), py::arg("u"));

    // solver
    m.def("evolve",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u0,
             int p, double dt, double t_end, int stride, double frame_speed) {
              EvolveConfig cfg{p, dt, t_end, stride};
              cfg.frame_speed = frame_speed;
              const Trajectory traj = evolve(from_numpy(g, u0), cfg);
              py::list snaps, times;
              for (const Field& f : traj.snapshots) {
                  snaps.append(to_numpy(f));
                  times.append(f.time);
              }
              return py::make_tuple(times, snaps);
          },
          py::arg("grid"), py::arg("u0"), py::arg("p"), py::arg("dt") = 1e-3,
          py::arg("t_end") = 1.0, py::arg("stride") = 100,
          py::arg("frame_speed") = 0.0);
    m.def("conserved_quantities",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             int p, bool want_F) {
              const ConservedTriple c =
                  conserved_quantities(from_numpy(g, u), p, want_F);
              py::dict out;
              out["M"] = c.M;
              out["E"] = c.E;
              if (c.F) out["F"] = *c.F;
              return out;
          },
          py::arg("grid"), py::arg("u"), py::arg("p"), py::arg("want_F") = false);

    // spectral
    m.def("soliton_spectrum",
          [](const SolitonParams& prm, const GridSpec& g, int k) {
              const LinearizedOperator op = assemble_soliton_operator(prm, g);
              const Field qp = soliton_profile_derivative(prm, g, 1);
              const SpectralReport rep = eigen_report(op, k, {qp});
              py::dict out;
              out["eigenvalues"] = rep.eigenvalues;
              out["negative_count"] = rep.negative_count;
              out["lambda0"] = rep.lambda0;
              out["kernel_alignments"] = rep.kernel_alignments;
              out["spectrum_edge"] = rep.spectrum_edge;
              return out;
          },
          py::arg("params"), py::arg("grid"), py::arg("k") = 8);
    m.def("breather_spectrum",
          [](const BreatherParams& prm, double t, const GridSpec& g, int k) {
              const LinearizedOperator op = assemble_breather_operator(prm, t, g);
              const BreatherDirections d = breather_directions(prm, t, g);
              const SpectralReport rep = eigen_report(op, k, {d.B1, d.B2});
              const WronskianCount w = wronskian_negative_count(prm, t);
              py::dict out;
              out["eigenvalues"] = rep.eigenvalues;
              out["negative_count"] = rep.negative_count;
              out["kernel_alignments"] = rep.kernel_alignments;
              out["spectrum_edge"] = rep.spectrum_edge;
              out["wronskian_count"] = w.count;
              out["wronskian_root"] = w.x0;
              return out;
          },
          py::arg("params"), py::arg("t"), py::arg("grid"), py::arg("k") = 8);

    // modulation
    m.def("fit_single",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             const SolitonParams& guess, bool fit_scaling) {
              const SingleFit fit =
                  fit_single(from_numpy(g, u), guess, fit_scaling);
              return py::make_tuple(fit.params, to_numpy(fit.residual),
                                    fit.iterations);
          },
          py::arg("grid"), py::arg("u"), py::arg("guess"),
          py::arg("fit_scaling") = true);
    m.def("fit_multi",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             const std::vector<SolitonParams>& guesses) {
              const MultiFit fit = fit_multi(from_numpy(g, u), guesses);
              return py::make_tuple(fit.params, to_numpy(fit.residual),
                                    fit.iterations);
          },
          py::arg("grid"), py::arg("u"), py::arg("guesses"));
    m.def("fit_breather",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             const BreatherParams& guess, double t) {
              const BreatherFit fit = fit_breather(from_numpy(g, u), guess, t);
              return py::make_tuple(fit.params, to_numpy(fit.residual),
                                    fit.iterations);
          },
          py::arg("grid"), py::arg("u"), py::arg("guess"), py::arg("t"));
    m.def("localized_mass",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             double m0, double A, double t) {
              return localized_mass(from_numpy(g, u), m0, A, t);
          },
          py::arg("grid"), py::arg("u"), py::arg("m0"), py::arg("A"),
          py::arg("t"));

    // backlund
    m.def("breather_identity_residuals",
          [](const BreatherParams& prm, double t, const GridSpec& g) {
              const BreatherIdentityResiduals r =
                  breather_identity_residuals(prm, t, g);
              py::dict out;
              out["first"] = r.first;
              out["second"] = r.second;
              out["nonlocal"] = r.nonlocal;
              out["elliptic"] = r.elliptic;
              return out;
          },
          py::arg("params"), py::arg("t"), py::arg("grid"));
    m.def("lyapunov_H",
          [](const GridSpec& g, py::array_t<double, py::array::c_style> u,
             const BreatherParams& prm) {
              return lyapunov_H(from_numpy(g, u), prm);
          },
          py::arg("grid"), py::arg("u"), py::arg("params"));

    // collision
    m.def("collision_corrections",
          [](int p, const GridSpec& g) {
              const CollisionCorrections first = first_order_corrections(p, g);
              const CollisionCorrections cor =
                  solve_second_order_system(p, g, first);
              py::dict out;
              out["a1"] = cor.a1;
              out["b1"] = cor.b1;
              out["a2"] = cor.a2;
              out["b"] = cor.b;
              out["A1"] = to_numpy(cor.A1);
              out["B1"] = to_numpy(cor.B1_kink());
              out["A2"] = to_numpy(cor.A2);
              out["B2"] = to_numpy(cor.B2());
              return out;
          },
          py::arg("p"), py::arg("grid"));
    m.def("measure_defect",
          [](int p, double c, double length, int n, double dt, double delta0) {
              CollisionConfig cfg;
              cfg.p = p;
              cfg.c = c;
              cfg.grid = GridSpec{length, n};
              cfg.dt = dt;
              cfg.delta0 = delta0;
              const DefectReport rep = measure_defect(cfg);
              py::dict out;
              out["defect_norm"] = rep.defect_norm;
              out["defect_norm_full"] = rep.defect_norm_full;
              out["post_fit"] = rep.post_fit;
              out["t_measure"] = rep.t_measure;
              return out;
          },
          py::arg("p"), py::arg("c"), py::arg("length") = 1000.0,
          py::arg("n") = 16384, py::arg("dt") = 1e-3, py::arg("delta0") = 0.05);
}
