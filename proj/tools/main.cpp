// SPDX-License-Identifier: MIT
// Command-line front end: fit-kss, fit-eup, optdim, check, transform.
//
// Exit status: 0 success, 2 model or usage error, 3 data error.
#include "expr.hpp"
#include "output.hpp"

#include "panelfactor/panelfactor.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace pf::cli {
namespace {

constexpr int kExitModel = 2;
constexpr int kExitData = 3;

struct Global {
  std::string data;
  std::string id = "id";
  std::string time = "time";
  std::string delimiter = ",";
  std::string output;
  std::vector<std::string> derive;
  std::vector<std::string> wide;
};

struct ModelArgs {
  std::string response;
  std::string regressors;
  bool no_intercept = false;
  std::string effects = "none";
};

struct KssArgs {
  ModelArgs model;
  std::optional<int> factor_dim;
  double level = 0.01;
  std::optional<double> spar;
  bool cv = false;
  double convergence = 1e-6;
  int max_iteration = 500;
  bool consult_dim = false;
  std::string restriction = "restrict.factors";
};

struct EupArgs {
  ModelArgs model;
  std::string dim_criterion = "PC1";
  std::optional<int> d_max;
  std::optional<int> factor_dim;
  bool single_iteration = false;
  int max_iteration = 500;
  double convergence = 1e-6;
  int error_case = 1;
  std::optional<int> bandwidth;
  std::string restriction = "restrict.factors";
};

struct OptDimArgs {
  std::string input;
  std::string criteria;
  std::optional<int> d_max;
  std::optional<double> sig2_hat;
  double level = 0.01;
  bool standardize = false;
  std::optional<double> spar;
};

struct CheckArgs {
  std::string test = "factor-existence";
  ModelArgs model;
  double level = 0.01;
  std::optional<int> d_max;
};

struct TransformArgs {
  std::vector<std::string> inputs;
  std::string steps;
  bool steps_given = false;
  std::string name;
};

Workspace make_workspace(const Global& g) {
  Workspace ws;
  if (g.delimiter.size() != 1) throw Error(ErrorCode::InvalidArgument, "--delimiter must be a single character");
  if (!g.data.empty()) ws.set_long_csv(g.data, g.id, g.time, g.delimiter[0]);
  for (const auto& w : g.wide) {
    const auto eq = w.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--wide expects NAME=PATH");
    ws.add_wide(w.substr(0, eq), w.substr(eq + 1));
  }
  for (const auto& d : g.derive) ws.define(d);
  return ws;
}

PanelSet build_panel_set(Workspace& ws, const ModelArgs& m) {
  if (m.response.empty()) throw Error(ErrorCode::InvalidArgument, "--response is required");
  if (m.regressors.empty()) throw Error(ErrorCode::InvalidArgument, "--regressors is required");
  std::vector<std::string> regs = split_top_level(m.regressors);
  std::vector<std::string> all = regs;
  all.push_back(m.response);
  ws.load(all);
  PanelSet s;
  s.response = ws.evaluate(m.response);
  for (const auto& r : regs) {
    s.regressor_names.push_back(r);
    s.regressors.push_back(ws.evaluate(r));
  }
  s.has_intercept = !m.no_intercept;
  s.validate();
  return s;
}

Json model_json(const std::string& kind, const ModelArgs& m, const PanelSet& s, const Design& ds) {
  return Json{{"model", kind},
              {"response", m.response},
              {"regressors", s.regressor_names},
              {"effects", to_string(ds.effects)},
              {"has_intercept", ds.intercept},
              {"T", ds.T()},
              {"n", ds.n()}};
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

void write_structure(const std::string& dir, const FactorStructure& fs, const AdditiveEffects& add,
                     const Design& ds, const PanelSet& s, const Matrix& veff) {
  write_text(dir, "factors.csv", factors_csv(fs, s.response.time_labels));
  write_text(dir, "loadings.csv", loadings_csv(fs, s.response.unit_labels));
  write_text(dir, "effects.csv",
             effects_csv(add, ds.effects, ds.intercept, s.response.time_labels, s.response.unit_labels));
  write_text(dir, "veff.csv", to_wide_csv(PanelMatrix{veff, s.response.time_labels, s.response.unit_labels}));
}

int run_fit_kss(const Global& g, const KssArgs& a) {
  Workspace ws = make_workspace(g);
  PanelSet s = build_panel_set(ws, a.model);
  KssOptions opt;
  opt.effects = parse_effects(a.model.effects);
  opt.factor_dim = a.factor_dim;
  opt.level = a.level;
  opt.spar = a.spar;
  opt.cv = a.cv;
  opt.convergence = a.convergence;
  opt.max_iteration = a.max_iteration;
  opt.restriction = parse_restriction(a.restriction);
  if (a.consult_dim) {
    DimReport rep = kss_consult(s, opt);
    std::cout << dims_table(rep);
    write_json(g.output, "dims.json", dims_json(rep));
    if (!a.factor_dim) {
      std::cerr << "consult-dim: criterion table written; choose a dimension and re-run with --factor-dim\n";
      return kExitModel;
    }
  }
  KssFit fit = kss_fit(s, opt);
  SummaryTable sum = kss_summary(fit);
  Json j = model_json("kss", a.model, s, fit.design);
  j["coefficients"] = coefficients_json(sum);
  j["d"] = fit.d_used;
  j["dim_criterion"] = fit.used_dim_criterion;
  j["dim_statistics"] = fit.dim_statistics;
  j["kappa"] = fit.kappa;
  j["kappa_gcv"] = fit.kappa_gcv;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["sigma2"] = fit.sig2;
  j["df"] = fit.df;
  j["residual_scale"] = std::sqrt(fit.sig2);
  j["r_squared"] = fit.r_squared;
  j["residual_quantiles"] = vector_json(sum.residual_quantiles);
  j["variance_shares"] = vector_json(variance_shares(fit.factors));
  j["restriction"] = to_string(fit.factors.restriction);
  if (a.cv) {
    Json cv = Json::array();
    for (const auto& [k, v] : fit.cv_scores) cv.push_back(Json{{"kappa", k}, {"cv", v}});
    j["cv_scores"] = cv;
  }
  j["flags"] = fit.flags;
  write_json(g.output, "fit.json", j);
  write_structure(g.output, fit.factors, fit.additive, fit.design, s, fit.v_hat);
  return 0;
}

int run_fit_eup(const Global& g, const EupArgs& a) {
  Workspace ws = make_workspace(g);
  PanelSet s = build_panel_set(ws, a.model);
  EupOptions opt;
  opt.effects = parse_effects(a.model.effects);
  opt.dim_criterion = parse_criterion(a.dim_criterion);
  opt.d_max = a.d_max;
  opt.factor_dim = a.factor_dim;
  opt.double_iteration = !a.single_iteration;
  opt.max_iteration = a.max_iteration;
  opt.convergence = a.convergence;
  opt.restriction = parse_restriction(a.restriction);
  EupFit fit = eup_fit(s, opt);
  ErrorCase ec{a.error_case, a.bandwidth};
  SlopeInference inf = (a.error_case == 7 || a.error_case == 8) ? bias_correct(fit, ec) : slope_covariance(fit, ec);
  SummaryTable sum = eup_summary(fit, inf);
  Json j = model_json("eup", a.model, s, fit.design);
  j["coefficients"] = coefficients_json(sum);
  if (fit.has_intercept) j["intercept"] = fit.intercept;
  j["error_case"] = a.error_case;
  if (inf.beta_star) {
    j["beta_uncorrected"] = vector_json(fit.beta);
    j["bias_B"] = vector_json(*inf.bias_B);
    j["bias_C"] = vector_json(*inf.bias_C);
  }
  j["d"] = fit.d_used;
  j["d_max"] = fit.d_max;
  j["dim_criterion"] = fit.dim_criterion;
  j["dimension_history"] = fit.dimension_history;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["sigma2"] = fit.sig2;
  j["df"] = fit.df;
  j["residual_scale"] = fit.residual_scale;
  j["r_squared"] = fit.r_squared;
  j["residual_quantiles"] = vector_json(sum.residual_quantiles);
  j["variance_shares"] = vector_json(variance_shares(fit.factors));
  j["restriction"] = to_string(fit.factors.restriction);
  std::vector<std::string> flags = fit.flags;
  flags.insert(flags.end(), inf.flags.begin(), inf.flags.end());
  j["flags"] = flags;
  write_json(g.output, "fit.json", j);
  write_structure(g.output, fit.factors, fit.additive, fit.design, s, fit.factors.common());
  return 0;
}

int run_optdim(const Global& g, const OptDimArgs& a) {
  if (a.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
  Workspace ws = make_workspace(g);
  ws.load({a.input});
  PanelMatrix p = ws.evaluate(a.input);
  DimConfig cfg;
  if (!a.criteria.empty())
    for (const auto& c : split_top_level(a.criteria)) cfg.criteria.push_back(parse_criterion(c));
  cfg.d_max = a.d_max;
  cfg.sig2_hat = a.sig2_hat;
  cfg.level = a.level;
  cfg.standardize = a.standardize;
  cfg.spar = a.spar;
  DimReport rep = opt_dim(p.values, cfg);
  std::cout << dims_table(rep);
  Json j = dims_json(rep);
  j["input"] = a.input;
  j["standardize"] = a.standardize;
  write_json(g.output, "dims.json", j);
  return 0;
}

int run_check(const Global& g, const CheckArgs& a) {
  Workspace ws = make_workspace(g);
  PanelSet s = build_panel_set(ws, a.model);
  const Effects eff = parse_effects(a.model.effects);
  TestResult r;
  Json extra;
  if (a.test == "factor-existence") {
    r = factor_existence_test(s, eff, a.level, a.d_max);
  } else if (a.test == "hausman") {
    EupOptions ro;
    ro.effects = eff;
    ro.factor_dim = 0;
    EupFit restricted = eup_fit(s, ro);
    EupOptions uo;
    uo.factor_dim = a.d_max ? *a.d_max : default_d_max(s.T(), s.n());
    EupFit unrestricted = eup_fit(s, uo);
    r = hausman_test(restricted, unrestricted, a.level);
    extra = Json{{"beta_restricted", vector_json(restricted.beta)},
                 {"beta_unrestricted", vector_json(unrestricted.beta)},
                 {"d_unrestricted", unrestricted.d_used}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "--test must be factor-existence or hausman");
  }
  Json j = test_json(r);
  j["effects"] = to_string(eff);
  j["response"] = a.model.response;
  j["regressors"] = split_top_level(a.model.regressors);
  if (!extra.is_null())
    for (auto& [k, v] : extra.items()) j[k] = v;
  write_json(g.output, "test.json", j);
  std::cout << r.test_name << ": statistic " << format_number(r.statistic) << ", critical value "
            << format_number(r.critical_value) << ", " << to_string(r.decision) << "\n";
  return 0;
}

int run_transform(const Global& g, const TransformArgs& a) {
  Global gg = g;
  std::vector<std::string> names;
  for (const auto& d : g.derive) names.push_back(d.substr(0, d.find('=')));
  if (!a.inputs.empty()) {
    if (a.inputs.size() > 1 && a.steps_given)
      throw Error(ErrorCode::InvalidArgument, "--steps applies to a single --input");
    for (const auto& in : a.inputs) {
      std::string expr = in;
      if (a.steps_given && !a.steps.empty()) {
        for (const auto& step : split_top_level(a.steps)) {
          const auto colon = step.find(':');
          const std::string op = step.substr(0, colon);
          const std::string arg = colon == std::string::npos ? "" : step.substr(colon + 1);
          if (op == "log" || op == "diff") {
            expr = op + "(" + expr + ")";
          } else if ((op == "deflate" || op == "within") && !arg.empty()) {
            expr = op + "(" + expr + "," + arg + ")";
          } else {
            throw Error(ErrorCode::InvalidArgument, "unknown step '" + step + "' (log, diff, deflate:BY, within:EFFECTS)");
          }
        }
      }
      const std::string name = (!a.name.empty() && a.inputs.size() == 1) ? a.name : expr;
      if (name != expr) gg.derive.push_back(name + "=" + expr);
      names.push_back(name);
    }
  }
  if (names.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to transform: give --derive or --input");
  Workspace ws = make_workspace(gg);
  ws.load(names);
  Json manifest = Json::array();
  for (const auto& name : names) {
    PanelMatrix p = ws.evaluate(name);
    const std::string file = name + ".csv";
    write_text(g.output, file, to_wide_csv(p));
    Json steps = Json::array();
    for (const auto& st : ws.steps(name)) {
      Json sj{{"op", st.op}};
      if (!st.argument.empty()) sj["argument"] = st.argument;
      steps.push_back(sj);
    }
    manifest.push_back(Json{{"name", name}, {"file", file}, {"T", p.T()}, {"n", p.n()}, {"steps", steps}});
  }
  Json j{{"source", g.data}, {"variables", manifest}};
  write_json(g.output, "manifest.json", j);
  return 0;
}

void add_model_options(CLI::App* cmd, ModelArgs& m, const std::string& default_effects) {
  m.effects = default_effects;
  cmd->add_option("--response", m.response, "response variable or expression");
  cmd->add_option("--regressors", m.regressors, "comma-separated regressors or expressions");
  cmd->add_flag("--no-intercept", m.no_intercept, "drop the overall intercept");
  cmd->add_option("--effects", m.effects, "none | individual | time | twoways")->capture_default_str();
}

int error_exit(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return e.category() == ErrorCategory::Data ? kExitData : kExitModel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panel regression with unobserved factor structures"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file ([command] sections for command options)");

  Global g;
  if (const char* env = std::getenv("PANELFACTOR_OUTPUT_DIR"); env && *env) g.output = env;
  else g.output = "panelfactor-out";
  app.add_option("--data", g.data, "long-format CSV (one row per unit and period)");
  app.add_option("--id", g.id, "unit identifier column")->capture_default_str();
  app.add_option("--time", g.time, "time column")->capture_default_str();
  app.add_option("--delimiter", g.delimiter, "CSV delimiter")->capture_default_str();
  app.add_option("--derive", g.derive, "NAME=EXPR variable definition (repeatable)");
  app.add_option("--wide", g.wide, "NAME=PATH wide-CSV panel (repeatable)");
  app.add_option("--output", g.output, "output directory (default $PANELFACTOR_OUTPUT_DIR or ./panelfactor-out)");

  KssArgs kss;
  auto* c_kss = app.add_subcommand("fit-kss", "smoothing-spline factor estimator");
  add_model_options(c_kss, kss.model, "none");
  c_kss->add_option("--factor-dim", kss.factor_dim, "fix the number of factors");
  c_kss->add_option("--level", kss.level, "level of the dimension test")->capture_default_str();
  c_kss->add_option("--spar", kss.spar, "fixed smoothing parameter kappa");
  c_kss->add_flag("--cv", kss.cv, "refine kappa by leave-one-unit-out cross-validation");
  c_kss->add_option("--convergence", kss.convergence)->capture_default_str();
  c_kss->add_option("--max-iteration", kss.max_iteration)->capture_default_str();
  c_kss->add_flag("--consult-dim", kss.consult_dim, "print the criterion table; requires --factor-dim to fit");
  c_kss->add_option("--restriction", kss.restriction, "restrict.factors | restrict.loadings")->capture_default_str();

  EupArgs eup;
  auto* c_eup = app.add_subcommand("fit-eup", "iterated least squares with estimated factor dimension");
  add_model_options(c_eup, eup.model, "none");
  c_eup->add_option("--dim-criterion", eup.dim_criterion, "PC1..PC3, BIC3, IC1..IC3, IPC1..IPC3")->capture_default_str();
  c_eup->add_option("--d-max", eup.d_max, "largest dimension considered");
  c_eup->add_option("--factor-dim", eup.factor_dim, "fix the number of factors");
  c_eup->add_flag("--single-iteration", eup.single_iteration, "update the dimension in every sweep");
  c_eup->add_option("--max-iteration", eup.max_iteration)->capture_default_str();
  c_eup->add_option("--convergence", eup.convergence)->capture_default_str();
  c_eup->add_option("--error-case", eup.error_case, "error structure 1..8 for standard errors")->capture_default_str();
  c_eup->add_option("--bandwidth", eup.bandwidth, "HAC truncation lag (cases 5 and 8)");
  c_eup->add_option("--restriction", eup.restriction, "restrict.factors | restrict.loadings")->capture_default_str();

  OptDimArgs od;
  auto* c_od = app.add_subcommand("optdim", "factor-dimension criteria");
  c_od->add_option("--input", od.input, "panel variable or expression");
  c_od->add_option("--criteria", od.criteria, "comma-separated criteria (default all)");
  c_od->add_option("--d-max", od.d_max);
  c_od->add_option("--sig2-hat", od.sig2_hat);
  c_od->add_option("--level", od.level)->capture_default_str();
  c_od->add_flag("--standardize", od.standardize);
  c_od->add_option("--spar", od.spar, "kappa for KSS.C");

  CheckArgs ck;
  auto* c_ck = app.add_subcommand("check", "specification tests");
  c_ck->add_option("--test", ck.test, "factor-existence | hausman")->capture_default_str();
  add_model_options(c_ck, ck.model, "twoways");
  c_ck->add_option("--level", ck.level)->capture_default_str();
  c_ck->add_option("--d-max", ck.d_max, "factors of the unrestricted fit / variance estimate");

  TransformArgs tr;
  auto* c_tr = app.add_subcommand("transform", "derive panel variables as wide CSV");
  c_tr->add_option("--input", tr.inputs, "variable or expression to export (repeatable)");
  c_tr->add_option("--steps", tr.steps, "pipeline applied to --input: log, diff, deflate:BY, within:EFFECTS");
  c_tr->add_option("--name", tr.name, "name of the derived variable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitModel;
  }
  tr.steps_given = c_tr->count("--steps") > 0;

  try {
    if (c_kss->parsed()) return run_fit_kss(g, kss);
    if (c_eup->parsed()) return run_fit_eup(g, eup);
    if (c_od->parsed()) return run_optdim(g, od);
    if (c_ck->parsed()) return run_check(g, ck);
    return run_transform(g, tr);
  } catch (const Error& e) {
    return error_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  }
}

}  // namespace pf::cli

int main(int argc, char** argv) { return pf::cli::main(argc, argv); }
