// SPDX-License-Identifier: MIT
#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pf::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void write_text(const std::string& dir, const std::string& file, const std::string& text) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / file).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

void write_json(const std::string& dir, const std::string& file, const Json& j) {
  write_text(dir, file, j.dump(2) + "\n");
}

std::string factors_csv(const FactorStructure& fs, const std::vector<std::string>& time_labels) {
  std::ostringstream os;
  os << "time";
  for (int l = 0; l < fs.d; ++l) os << ",F" << (l + 1);
  os << "\n";
  for (Index t = 0; t < fs.F.rows(); ++t) {
    os << time_labels.at(static_cast<std::size_t>(t));
    for (int l = 0; l < fs.d; ++l) os << "," << format_number(fs.F(t, l));
    os << "\n";
  }
  return os.str();
}

std::string loadings_csv(const FactorStructure& fs, const std::vector<std::string>& unit_labels) {
  std::ostringstream os;
  os << "unit";
  for (int l = 0; l < fs.d; ++l) os << ",L" << (l + 1);
  os << "\n";
  for (Index i = 0; i < fs.Lambda.rows(); ++i) {
    os << unit_labels.at(static_cast<std::size_t>(i));
    for (int l = 0; l < fs.d; ++l) os << "," << format_number(fs.Lambda(i, l));
    os << "\n";
  }
  return os.str();
}

std::string effects_csv(const AdditiveEffects& a, Effects effects, bool has_intercept,
                        const std::vector<std::string>& time_labels, const std::vector<std::string>& unit_labels) {
  std::ostringstream os;
  os << "kind,label,value\n";
  if (has_intercept || effects == Effects::Twoways) os << "mu,," << format_number(a.mu) << "\n";
  if (effects == Effects::Individual || effects == Effects::Twoways)
    for (Index i = 0; i < a.alpha.size(); ++i)
      os << "alpha," << unit_labels.at(static_cast<std::size_t>(i)) << "," << format_number(a.alpha(i)) << "\n";
  if (effects == Effects::Time || effects == Effects::Twoways)
    for (Index t = 0; t < a.theta.size(); ++t)
      os << "theta," << time_labels.at(static_cast<std::size_t>(t)) << "," << format_number(a.theta(t)) << "\n";
  return os.str();
}

Json coefficients_json(const SummaryTable& table) {
  Json arr = Json::array();
  for (const auto& r : table.coefficients)
    arr.push_back(Json{{"name", r.name},
                       {"estimate", number(r.estimate)},
                       {"se", number(r.se)},
                       {"z", number(r.z)},
                       {"p", number(r.p)}});
  return arr;
}

Json dims_json(const DimReport& rep) {
  Json j;
  Json crit = Json::object();
  for (const auto& [name, d] : rep.dims) crit[name] = d;
  j["criteria"] = crit;
  j["d_max"] = rep.d_max_used;
  j["sig2"] = number(rep.sig2_used);
  if (rep.sig2_kss) j["sig2_kss"] = number(*rep.sig2_kss);
  if (rep.kappa_kss) j["kappa_kss"] = number(*rep.kappa_kss);
  Json shares = Json::array();
  for (Index k = 0; k < rep.eigen_shares.size(); ++k) shares.push_back(number(rep.eigen_shares(k)));
  j["eigen_shares"] = shares;
  j["flags"] = rep.flags;
  return j;
}

Json test_json(const TestResult& r) {
  return Json{{"test", r.test_name},          {"statistic", number(r.statistic)}, {"p_value", number(r.p_value)},
              {"critical_value", number(r.critical_value)}, {"level", r.level}, {"decision", to_string(r.decision)},
              {"distribution", r.distribution}};
}

std::string dims_table(const DimReport& rep) {
  std::ostringstream os;
  for (const auto& [name, d] : rep.dims) {
    std::string padded = name;
    padded.resize(std::max<std::size_t>(padded.size(), 8), ' ');
    os << padded << " " << d << "\n";
  }
  for (const auto& f : rep.flags) os << "note: " << f << "\n";
  return os.str();
}

}  // namespace pf::cli
