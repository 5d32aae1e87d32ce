// SPDX-License-Identifier: MIT
// Python bindings: panels are passed as T x n float64 NumPy arrays.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "panelfactor/panelfactor.hpp"

#include <string>
#include <vector>

namespace py = pybind11;
using namespace pf;

namespace {

PanelSet make_set(const Matrix& y, const std::vector<Matrix>& xs, const std::vector<std::string>& names,
                  bool intercept) {
  PanelSet s;
  s.response = PanelMatrix::from_values(y);
  for (std::size_t p = 0; p < xs.size(); ++p) {
    s.regressor_names.push_back(p < names.size() ? names[p] : "x" + std::to_string(p + 1));
    s.regressors.push_back(PanelMatrix::from_values(xs[p]));
  }
  s.has_intercept = intercept;
  return s;
}

py::dict dims_dict(const DimReport& r) {
  py::dict d;
  for (const auto& [k, v] : r.dims) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Panel regression with unobserved factor structures (compiled core)";

  // Messages start with the stable error code, e.g. "NegativeStatistic: ...".
  py::register_exception<Error>(m, "PanelFactorError", PyExc_RuntimeError);

  m.def(
      "within_transform",
      [](const Matrix& w, const std::string& effects) { return within_transform(w, parse_effects(effects)); },
      py::arg("panel"), py::arg("effects") = "twoways");

  m.def(
      "opt_dim",
      [](const Matrix& w, std::vector<std::string> criteria, std::optional<int> d_max, bool standardize) {
        DimConfig cfg;
        for (const auto& c : criteria) cfg.criteria.push_back(parse_criterion(c));
        cfg.d_max = d_max;
        cfg.standardize = standardize;
        return dims_dict(opt_dim(w, cfg));
      },
      py::arg("panel"), py::arg("criteria") = std::vector<std::string>{}, py::arg("d_max") = py::none(),
      py::arg("standardize") = false);

  m.def(
      "fit_kss",
      [](const Matrix& y, const std::vector<Matrix>& xs, const std::vector<std::string>& names, bool intercept,
         const std::string& effects, std::optional<int> factor_dim, std::optional<double> spar) {
        KssOptions o;
        o.effects = parse_effects(effects);
        o.factor_dim = factor_dim;
        o.spar = spar;
        KssFit f = kss_fit(make_set(y, xs, names, intercept), o);
        py::dict d;
        d["beta"] = f.beta;
        d["beta_cov"] = f.beta_cov;
        d["intercept"] = f.intercept;
        d["intercept_se"] = f.intercept_se;
        d["kappa"] = f.kappa;
        d["d"] = f.d_used;
        d["F"] = f.factors.F;
        d["Lambda"] = f.factors.Lambda;
        d["residuals"] = f.residuals;
        d["sigma2"] = f.sig2;
        d["r_squared"] = f.r_squared;
        d["variance_shares"] = variance_shares(f.factors);
        return d;
      },
      py::arg("y"), py::arg("x"), py::arg("names") = std::vector<std::string>{}, py::arg("intercept") = false,
      py::arg("effects") = "none", py::arg("factor_dim") = py::none(), py::arg("spar") = py::none());

  m.def(
      "fit_eup",
      [](const Matrix& y, const std::vector<Matrix>& xs, const std::vector<std::string>& names, bool intercept,
         const std::string& effects, const std::string& dim_criterion, std::optional<int> factor_dim,
         std::optional<int> d_max, int error_case) {
        EupOptions o;
        o.effects = parse_effects(effects);
        o.dim_criterion = parse_criterion(dim_criterion);
        o.factor_dim = factor_dim;
        o.d_max = d_max;
        EupFit f = eup_fit(make_set(y, xs, names, intercept), o);
        SlopeInference inf = slope_covariance(f, ErrorCase{error_case, std::nullopt});
        py::dict d;
        d["beta"] = f.beta;
        d["se"] = inf.se;
        d["cov"] = inf.cov;
        d["d"] = f.d_used;
        d["iterations"] = f.iterations;
        d["F"] = f.factors.F;
        d["Lambda"] = f.factors.Lambda;
        d["residuals"] = f.residuals;
        d["residual_scale"] = f.residual_scale;
        d["r_squared"] = f.r_squared;
        return d;
      },
      py::arg("y"), py::arg("x"), py::arg("names") = std::vector<std::string>{}, py::arg("intercept") = false,
      py::arg("effects") = "none", py::arg("dim_criterion") = "PC1", py::arg("factor_dim") = py::none(),
      py::arg("d_max") = py::none(), py::arg("error_case") = 1);

  m.def(
      "factor_existence_test",
      [](const Matrix& y, const std::vector<Matrix>& xs, const std::string& effects, double level) {
        TestResult t = factor_existence_test(make_set(y, xs, {}, false), parse_effects(effects), level);
        py::dict d;
        d["statistic"] = t.statistic;
        d["p_value"] = t.p_value;
        d["critical_value"] = t.critical_value;
        d["reject"] = t.decision == Decision::Reject;
        return d;
      },
      py::arg("y"), py::arg("x"), py::arg("effects") = "twoways", py::arg("level") = 0.01);
}
