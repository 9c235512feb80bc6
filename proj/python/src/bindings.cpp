#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "skewlab/cocycle.hpp"
#include "skewlab/config.hpp"
#include "skewlab/deviation.hpp"
#include "skewlab/error.hpp"
#include "skewlab/lattice.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/regularity.hpp"
#include "skewlab/report.hpp"
#include "skewlab/runner.hpp"
#include "skewlab/spectrum.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace skewlab;

namespace {

FiniteVolumeOperator from_diag(std::vector<double> diag, long long first) {
  if (diag.empty()) throw Error(ErrorKind::Argument, "empty diagonal");
  const auto last = first + static_cast<long long>(diag.size()) - 1;
  return FiniteVolumeOperator(Interval{first, last}, std::move(diag));
}

}  // namespace

PYBIND11_MODULE(_skewlab, m) {
  m.attr("__version__") = SKEWLAB_VERSION;

  static py::handle exc = py::exception<Error>(m, "SkewlabError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(exc.ptr(), message.c_str());
    }
  });

  m.def("set_worker_count", &set_worker_count, "workers"_a);

  py::class_<AnalyticPotential>(m, "Potential")
      .def_static("cosine", &AnalyticPotential::cosine, "rho"_a = 1.0)
      .def_static("constant", &AnalyticPotential::constant, "value"_a, "rho"_a = 1.0)
      .def_static("zero", &AnalyticPotential::zero, "rho"_a = 1.0)
      .def_static("from_string", &resolve_potential, "spec"_a, "rho"_a = 1.0)
      .def("__call__", py::overload_cast<double>(&AnalyticPotential::operator(), py::const_), "x"_a)
      .def("derivative", &AnalyticPotential::derivative, "x"_a);

  m.def(
      "growth_rate",
      [](const std::vector<double>& diag, double energy) { return transfer_product(diag, energy).growth_rate(); },
      "diag"_a, "energy"_a);
  m.def(
      "skew_growth_rate",
      [](const AnalyticPotential& p, double lambda, double energy, double omega, std::vector<double> x, long long n) {
        const auto d = x.size();
        const SkewShift driver(SkewShiftParams(d, omega, std::move(x)));
        return transfer_product(driver, p, lambda, energy, n).growth_rate();
      },
      "potential"_a, "lam"_a, "energy"_a, "omega"_a, "x"_a, "n"_a);
  m.def(
      "lyapunov_curve",
      [](const AnalyticPotential& p, double lambda, double energy, double omega, std::size_t d,
         std::vector<long long> n_list, long long samples, std::uint64_t seed) {
        const SkewShiftFamily fam(d, omega);
        const auto c = lyapunov_curve(fam, p, lambda, energy, n_list, samples, seed);
        py::list out;
        for (const auto& e : c.entries) out.append(py::dict("n"_a = e.n, "L_n"_a = e.L_n, "stderr"_a = e.stderr_));
        return out;
      },
      "potential"_a, "lam"_a, "energy"_a, "omega"_a, "d"_a, "n_list"_a, "samples"_a, "seed"_a);

  m.def(
      "determinants",
      [](std::vector<double> diag, double energy) { return determinant_sequence(from_diag(std::move(diag), 1), energy).values(); },
      "diag"_a, "energy"_a);
  m.def(
      "green_matrix",
      [](std::vector<double> diag, double energy) {
        const auto op = from_diag(std::move(diag), 1);
        const Resolvent g(op, energy);
        g.require_regular();
        std::vector<std::vector<double>> out(op.size(), std::vector<double>(op.size()));
        for (std::size_t i = 0; i < op.size(); ++i)
          for (std::size_t j = 0; j < op.size(); ++j) out[i][j] = g.entry(i, j);
        return out;
      },
      "diag"_a, "energy"_a);
  m.def(
      "eigenvalues", [](std::vector<double> diag) { return eigenvalues(from_diag(std::move(diag), 1)); }, "diag"_a);
  m.def(
      "eigenpairs",
      [](std::vector<double> diag) {
        const auto pairs = eigen_all(from_diag(std::move(diag), 1));
        std::vector<double> values;
        std::vector<std::vector<double>> vectors;
        for (const auto& p : pairs) {
          values.push_back(p.value);
          vectors.push_back(p.vector);
        }
        return py::make_tuple(values, vectors);
      },
      "diag"_a);
  m.def(
      "sturm_count", [](std::vector<double> diag, double e) { return sturm_count(from_diag(std::move(diag), 1), e); },
      "diag"_a, "energy"_a);

  m.def(
      "weyl_sum", [](long long k, double y, double omega, long long N) { return weyl_sum(k, y, omega, N).value; },
      "k"_a, "y"_a, "omega"_a, "N"_a);
  m.def(
      "minsum_bound",
      [](double omega, long long P, long long Q, double beta) {
        const auto r = minsum_bound(omega, P, Q, beta);
        return py::dict("lhs"_a = r.lhs, "rhs"_a = r.rhs, "q"_a = r.q_used, "holds"_a = r.holds);
      },
      "omega"_a, "P"_a, "Q"_a, "beta"_a);
  m.def("fourier_coefficients", [](const std::vector<double>& u) { return fourier_decay(u).coeffs; }, "values"_a);
  m.def(
      "deviation_fraction",
      [](const AnalyticPotential& p, double lambda, double energy, double omega, long long n, long long x_grid,
         long long y_samples, double threshold_factor, std::uint64_t seed) {
        return deviation_measure(p, lambda, energy, omega, n, x_grid, y_samples, threshold_factor, seed).fraction;
      },
      "potential"_a, "lam"_a, "energy"_a, "omega"_a, "n"_a, "x_grid"_a, "y_samples"_a, "threshold_factor"_a,
      "seed"_a);

  m.def(
      "modulus_fit",
      [](const std::vector<std::pair<double, double>>& pairs) {
        const auto f = modulus_fit(pairs);
        return py::dict("c"_a = f.c, "tau"_a = f.tau, "r2"_a = f.r2);
      },
      "pairs"_a);

  m.def(
      "admissible_energies",
      [](const AnalyticPotential& p, double delta) { return admissible_energies(p, delta).intervals; },
      "potential"_a, "delta"_a);
  m.def("spectrum_union", &spectrum_union, "potential"_a, "lam"_a, "omega"_a, "d"_a, "N"_a, "x_samples"_a,
        "seed"_a);
  m.def(
      "parametrize",
      [](const AnalyticPotential& p, double lambda, double omega, double E0, long long M, long long x_grid,
         double epsilon, double L) {
        const auto r = parametrize(p, lambda, omega, E0, M, x_grid, epsilon, L);
        return py::dict("y0"_a = r.y0, "x"_a = r.x_samples, "zeta"_a = r.zeta_values, "measure"_a = r.measure_est,
                        "slope_sup"_a = r.slope_sup, "claims_valid"_a = r.claims_valid);
      },
      "potential"_a, "lam"_a, "omega"_a, "E0"_a, "M"_a, "x_grid"_a, "epsilon"_a, "L"_a);

  m.def(
      "run",
      [](const std::map<std::string, std::string>& values) { return emit_json(run(parse_config(values))); },
      "config"_a, "Runs one experiment from key/value settings and returns the JSON report.");
}
