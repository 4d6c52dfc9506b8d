#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "evospec/estimator.hpp"
#include "evospec/montecarlo.hpp"
#include "evospec/simulate.hpp"
#include "evospec/specialfn.hpp"
#include "evospec/stattest.hpp"
#include "evospec/taper.hpp"
#include "evospec/tradeoff.hpp"

namespace py = pybind11;
using namespace evospec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TimeSeries to_series(const Array& x) {
  if (x.ndim() != 1) throw std::invalid_argument("expected a one-dimensional series");
  TimeSeries ts;
  ts.values.assign(x.data(), x.data() + x.size());
  ts.validate();
  return ts;
}

Array matrix(const std::vector<double>& v, py::ssize_t rows, py::ssize_t cols) {
  Array out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Study to_study(const std::string& s) {
  if (s == "size") return Study::size;
  if (s == "power") return Study::power;
  throw std::invalid_argument("study must be 'size' or 'power'");
}

py::dict grid_dict(const TFGrid& g) {
  py::dict d;
  d["I"] = g.I();
  d["J"] = g.J();
  d["N"] = g.N;
  d["K"] = g.K;
  d["B"] = g.spacing;
  d["buffer"] = g.buffer;
  d["block_centers"] = g.block_centers;
  d["freqs"] = g.freqs;
  return d;
}

struct Pipeline {
  TFGrid grid;
  SpectralEstimate est;
};

Pipeline run_estimate(const Array& x, int K, std::optional<int> blocks, double buffer_frac) {
  const TimeSeries ts = to_series(x);
  Pipeline p;
  p.grid = build_grid(ts.size(), GridOptions{K, blocks, buffer_frac});
  p.est = estimate_grid(ts, p.grid, compute_dpss(grid_taper_spec(p.grid)));
  return p;
}

py::dict point_dict(const TradeoffPoint& p) {
  py::dict d;
  d["N"] = p.N;
  d["K"] = p.K;
  d["W"] = p.W;
  d["log_term"] = p.log_term;
  d["resolution_term"] = p.resolution_term;
  d["variance_term"] = p.variance_term;
  d["nonstationary_term"] = p.nonstationary_term;
  d["mse18"] = p.mse18;
  d["mse19"] = p.mse19;
  d["penalty"] = p.penalty;
  d["objective"] = p.objective;
  return d;
}

}  // namespace

PYBIND11_MODULE(_evospec, m) {
  m.doc() = "Multitaper evolutionary spectra and stationarity tests";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const std::out_of_range& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("digamma", &digamma, py::arg("x"));
  m.def("trigamma", &trigamma, py::arg("x"));
  m.def("chi2_quantile", py::overload_cast<double, int>(&chi2_quantile), py::arg("p"), py::arg("df"));

  m.def(
      "dpss",
      [](int N, double W, std::optional<int> K) {
        TaperSpec spec{N, W, 0};
        spec.K = K.value_or(spec.max_tapers());
        spec.validate();
        const TaperSet ts = compute_dpss(spec);
        std::vector<double> flat;
        for (int k = 0; k < ts.K(); ++k) flat.insert(flat.end(), ts.taper(k).begin(), ts.taper(k).end());
        py::dict d;
        d["tapers"] = matrix(flat, ts.K(), ts.N());
        d["eigenvalues"] = ts.eigenvalues();
        d["widths"] = ts.widths();
        d["l1_concentration"] = l1_concentration(ts);
        return d;
      },
      py::arg("N"), py::arg("W"), py::arg("K") = py::none(),
      "Slepian tapers (K x N, 2*pi*sum g^2 = 1) with eigenvalues, widths and L1 window distance.");

  m.def(
      "simulate",
      [](const std::string& model, std::size_t T, std::uint64_t seed, const std::string& study, int sign) {
        if (model.size() != 1) throw std::invalid_argument("model id must be a single letter a..h");
        const auto v = evospec::simulate(model_catalog(model[0], to_study(study), sign), T, seed).values;
        Array out(static_cast<py::ssize_t>(v.size()));
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out;
      },
      py::arg("model"), py::arg("T") = 512, py::arg("seed") = 7, py::arg("study") = "size",
      py::arg("envelope_sign") = 1);

  m.def(
      "estimate",
      [](const Array& x, int K, std::optional<int> blocks, double buffer_frac) {
        const Pipeline p = run_estimate(x, K, blocks, buffer_frac);
        py::dict d;
        d["values"] = matrix(p.est.values, p.grid.I(), p.grid.J());
        d["grid"] = grid_dict(p.grid);
        return d;
      },
      py::arg("x"), py::arg("K") = 5, py::arg("blocks") = py::none(), py::arg("buffer_frac") = 0.7,
      "I x J multitaper evolutionary spectrum on the default grid.");

  m.def(
      "psr_test",
      [](const Array& x, double alpha, int K, std::optional<int> blocks, double buffer_frac) {
        const Pipeline p = run_estimate(x, K, blocks, buffer_frac);
        const PsrReport r = evospec::psr_test(log_table(p.est), alpha);
        py::dict d;
        d["S_T"] = r.S_T;
        d["S_F"] = r.S_F;
        d["S_IR"] = r.S_IR;
        d["sigma2"] = r.sigma2;
        d["df"] = py::make_tuple(r.df_T, r.df_F, r.df_IR);
        d["thresholds"] = py::make_tuple(r.threshold_T, r.threshold_F, r.threshold_IR);
        d["um_flag"] = r.um_flag;
        d["decision"] = to_string(r.decision);
        d["grid"] = grid_dict(p.grid);
        return d;
      },
      py::arg("x"), py::arg("alpha") = 0.05, py::arg("K") = 5, py::arg("blocks") = py::none(),
      py::arg("buffer_frac") = 0.7);

  m.def(
      "rs_test",
      [](const Array& x, double alpha, int K, std::optional<int> blocks, double buffer_frac) {
        const Pipeline p = run_estimate(x, K, blocks, buffer_frac);
        const RsReport r = evospec::rs_test(log_table(p.est), alpha);
        py::dict d;
        d["t_R"] = r.t_R;
        d["SS_R"] = r.SS_R;
        d["row_mean_ranks"] = r.row_mean_ranks;
        d["df"] = r.df;
        d["threshold"] = r.threshold;
        d["decision"] = to_string(r.decision);
        d["grid"] = grid_dict(p.grid);
        return d;
      },
      py::arg("x"), py::arg("alpha") = 0.05, py::arg("K") = 5, py::arg("blocks") = py::none(),
      py::arg("buffer_frac") = 0.7);

  m.def(
      "mc_study",
      [](const std::string& model, int M, std::size_t T, double alpha, std::uint64_t seed, const std::string& study,
         int sign) {
        if (model.size() != 1) throw std::invalid_argument("model id must be a single letter a..h");
        McOptions o;
        o.M = M;
        o.T = T;
        o.alpha = alpha;
        o.seed = seed;
        McSummary s;
        {
          py::gil_scoped_release release;
          s = evospec::mc_study(model_catalog(model[0], to_study(study), sign), o);
        }
        py::dict d;
        d["model"] = s.model;
        d["M"] = s.M;
        d["included"] = s.included;
        d["exclusions"] = s.exclusions;
        d["psr_rate"] = s.psr_rate;
        d["rs_rate"] = s.rs_rate;
        d["psr_ci"] = py::make_tuple(s.psr_ci.lo, s.psr_ci.hi);
        d["rs_ci"] = py::make_tuple(s.rs_ci.lo, s.rs_ci.hi);
        return d;
      },
      py::arg("model"), py::arg("M") = 1000, py::arg("T") = 512, py::arg("alpha") = 0.05, py::arg("seed") = 7,
      py::arg("study") = "size", py::arg("envelope_sign") = 1);

  m.def(
      "optimal_curve",
      [](const std::vector<int>& Ns, int formula, double a) {
        const Formula f = formula == 18 ? Formula::with_modulation : Formula::stationary;
        if (formula != 18 && formula != 19) throw std::invalid_argument("formula must be 18 or 19");
        std::vector<TradeoffPoint> pts;
        {
          py::gil_scoped_release release;
          pts = evospec::optimal_curve(
              Ns, f, f == Formula::with_modulation ? std::optional<double>(bump_characteristic_width(a)) : std::nullopt);
        }
        py::list out;
        for (const auto& p : pts) out.append(point_dict(p));
        return out;
      },
      py::arg("Ns"), py::arg("formula") = 18, py::arg("a") = 200.0,
      "Minimized MSE surrogate per N, with the four terms reported separately.");

  m.def(
      "penalized_K",
      [](int N, double a, double weight) {
        return point_dict(evospec::penalized_K(N, bump_characteristic_width(a), weight));
      },
      py::arg("N"), py::arg("a") = 200.0, py::arg("penalty_weight") = 1.0);
}
