// SPDX-License-Identifier: MIT
#include "panelfactor/panel.hpp"

#include "panelfactor/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace pf {

namespace {

bool parse_double(const std::string& s, double& out) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.push_back(line);
  }
  return lines;
}

// Sorted unique labels; numeric order when every label is a number.
std::vector<std::string> ordered_labels(const std::set<std::string>& labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  bool numeric = true;
  for (const auto& l : out) {
    double v;
    if (!parse_double(l, v)) {
      numeric = false;
      break;
    }
  }
  if (numeric) {
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
      double x = 0, y = 0;
      parse_double(a, x);
      parse_double(b, y);
      if (x != y) return x < y;
      return a < b;
    });
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

double stable_sum(const Matrix& m) {
  double sum = 0.0, comp = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      double x = m(i, j);
      double t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    }
  }
  return sum + comp;
}

Vector column_means(const Matrix& m) {
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) out(j) = stable_sum(m.col(j)) / static_cast<double>(m.rows());
  return out;
}

Vector row_means(const Matrix& m) {
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) out(i) = stable_sum(m.row(i)) / static_cast<double>(m.cols());
  return out;
}

PanelMatrix PanelMatrix::from_values(Matrix values) {
  std::vector<std::string> t(static_cast<std::size_t>(values.rows()));
  std::vector<std::string> u(static_cast<std::size_t>(values.cols()));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::to_string(i + 1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::to_string(i + 1);
  return make(std::move(values), std::move(t), std::move(u));
}

PanelMatrix PanelMatrix::make(Matrix values, std::vector<std::string> time_labels,
                              std::vector<std::string> unit_labels) {
  PanelMatrix p{std::move(values), std::move(time_labels), std::move(unit_labels)};
  p.validate();
  return p;
}

void PanelMatrix::validate() const {
  if (values.rows() < 2 || values.cols() < 2)
    throw Error(ErrorCode::TooShort, "panel needs T >= 2 and n >= 2");
  if (static_cast<Index>(time_labels.size()) != values.rows() ||
      static_cast<Index>(unit_labels.size()) != values.cols())
    throw Error(ErrorCode::ShapeMismatch, "label count does not match panel shape");
  if (std::set<std::string>(time_labels.begin(), time_labels.end()).size() != time_labels.size())
    throw Error(ErrorCode::DuplicateCell, "time labels are not unique");
  if (std::set<std::string>(unit_labels.begin(), unit_labels.end()).size() != unit_labels.size())
    throw Error(ErrorCode::DuplicateCell, "unit labels are not unique");
  if (!values.allFinite()) throw Error(ErrorCode::NonFinite, "panel contains non-finite values");
}

Effects parse_effects(const std::string& name) {
  if (name == "none") return Effects::None;
  if (name == "individual") return Effects::Individual;
  if (name == "time") return Effects::Time;
  if (name == "twoways") return Effects::Twoways;
  throw Error(ErrorCode::InvalidArgument, "unknown effects kind '" + name + "'");
}

std::string to_string(Effects effects) {
  switch (effects) {
    case Effects::None: return "none";
    case Effects::Individual: return "individual";
    case Effects::Time: return "time";
    case Effects::Twoways: return "twoways";
  }
  return "none";
}

void PanelSet::validate() const {
  response.validate();
  if (regressor_names.size() != regressors.size())
    throw Error(ErrorCode::InvalidArgument, "regressor names and panels differ in count");
  std::set<std::string> seen;
  for (std::size_t j = 0; j < regressors.size(); ++j) {
    const auto& x = regressors[j];
    x.validate();
    if (x.T() != T() || x.n() != n())
      throw Error(ErrorCode::ShapeMismatch, "regressor '" + regressor_names[j] + "' has a different shape");
    if (x.time_labels != response.time_labels || x.unit_labels != response.unit_labels)
      throw Error(ErrorCode::ShapeMismatch, "regressor '" + regressor_names[j] + "' has different labels");
    if (regressor_names[j] == "intercept" || regressor_names[j] == "(Intercept)")
      throw Error(ErrorCode::InvalidArgument, "regressor name 'intercept' is reserved");
    if (!seen.insert(regressor_names[j]).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate regressor name '" + regressor_names[j] + "'");
  }
}

std::map<std::string, PanelMatrix> parse_long_csv(const std::string& text, const std::string& id_col,
                                                  const std::string& time_col,
                                                  const std::vector<std::string>& value_cols,
                                                  const CsvOptions& options) {
  auto lines = read_lines(text);
  if (lines.empty()) throw Error(ErrorCode::MissingCell, "CSV has no header");
  auto header = split_record(lines[0], options.delimiter);
  auto find_col = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::MissingCell, "column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t id_idx = find_col(id_col);
  std::size_t time_idx = find_col(time_col);
  std::vector<std::size_t> val_idx;
  for (const auto& c : value_cols) val_idx.push_back(find_col(c));

  struct Row {
    std::string id, time;
    std::vector<double> vals;
  };
  std::vector<Row> rows;
  std::set<std::string> ids, times;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto f = split_record(lines[r], options.delimiter);
    if (f.size() != header.size())
      throw Error(ErrorCode::MissingCell, "line " + std::to_string(r + 1) + " has " + std::to_string(f.size()) +
                                              " fields, expected " + std::to_string(header.size()));
    Row row{f[id_idx], f[time_idx], {}};
    for (std::size_t k = 0; k < val_idx.size(); ++k) {
      double v;
      if (!parse_double(f[val_idx[k]], v))
        throw Error(ErrorCode::NonNumericValue, "line " + std::to_string(r + 1) + ", column '" + value_cols[k] +
                                                    "': '" + f[val_idx[k]] + "' is not numeric");
      row.vals.push_back(v);
    }
    ids.insert(row.id);
    times.insert(row.time);
    rows.push_back(std::move(row));
  }
  auto unit_labels = ordered_labels(ids);
  auto time_labels = ordered_labels(times);
  std::map<std::string, Index> uix, tix;
  for (std::size_t i = 0; i < unit_labels.size(); ++i) uix[unit_labels[i]] = static_cast<Index>(i);
  for (std::size_t i = 0; i < time_labels.size(); ++i) tix[time_labels[i]] = static_cast<Index>(i);
  const Index T = static_cast<Index>(time_labels.size());
  const Index n = static_cast<Index>(unit_labels.size());

  std::vector<Matrix> mats(value_cols.size(), Matrix::Zero(T, n));
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(T, n, false);
  for (const auto& row : rows) {
    Index t = tix[row.time], i = uix[row.id];
    if (filled(t, i))
      throw Error(ErrorCode::DuplicateCell, "duplicate cell (id=" + row.id + ", time=" + row.time + ")");
    filled(t, i) = true;
    for (std::size_t k = 0; k < mats.size(); ++k) mats[k](t, i) = row.vals[k];
  }
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i)
      if (!filled(t, i))
        throw Error(ErrorCode::MissingCell, "missing cell (id=" + unit_labels[static_cast<std::size_t>(i)] +
                                                ", time=" + time_labels[static_cast<std::size_t>(t)] + ")");
  std::map<std::string, PanelMatrix> out;
  for (std::size_t k = 0; k < mats.size(); ++k)
    out.emplace(value_cols[k], PanelMatrix::make(std::move(mats[k]), time_labels, unit_labels));
  return out;
}

std::map<std::string, PanelMatrix> load_long_csv(const std::string& path, const std::string& id_col,
                                                 const std::string& time_col,
                                                 const std::vector<std::string>& value_cols,
                                                 const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_long_csv(ss.str(), id_col, time_col, value_cols, options);
}

std::string to_wide_csv(const PanelMatrix& panel) {
  std::ostringstream os;
  os << "time";
  for (const auto& u : panel.unit_labels) os << ',' << u;
  os << '\n';
  for (Index t = 0; t < panel.T(); ++t) {
    os << panel.time_labels[static_cast<std::size_t>(t)];
    for (Index i = 0; i < panel.n(); ++i) os << ',' << format_double(panel.values(t, i));
    os << '\n';
  }
  return os.str();
}

void write_wide_csv(const PanelMatrix& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << to_wide_csv(panel);
}

PanelMatrix parse_wide_csv(const std::string& text) {
  auto lines = read_lines(text);
  if (lines.size() < 2) throw Error(ErrorCode::TooShort, "wide CSV needs a header and data rows");
  auto header = split_record(lines[0], ',');
  std::vector<std::string> units(header.begin() + 1, header.end());
  std::vector<std::string> times;
  Matrix m(static_cast<Index>(lines.size() - 1), static_cast<Index>(units.size()));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto f = split_record(lines[r], ',');
    if (f.size() != header.size()) throw Error(ErrorCode::MissingCell, "ragged wide CSV row " + std::to_string(r + 1));
    times.push_back(f[0]);
    for (std::size_t c = 1; c < f.size(); ++c) {
      double v;
      if (!parse_double(f[c], v)) throw Error(ErrorCode::NonNumericValue, "non-numeric value '" + f[c] + "'");
      m(static_cast<Index>(r - 1), static_cast<Index>(c - 1)) = v;
    }
  }
  return PanelMatrix::make(std::move(m), std::move(times), std::move(units));
}

PanelMatrix read_wide_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_wide_csv(ss.str());
}

PanelMatrix log_panel(const PanelMatrix& panel) {
  if ((panel.values.array() <= 0.0).any())
    throw Error(ErrorCode::DomainError, "log requires strictly positive entries");
  PanelMatrix out = panel;
  out.values = panel.values.array().log().matrix();
  return out;
}

PanelMatrix divide_panel(const PanelMatrix& panel, const PanelMatrix& divisor) {
  if (panel.T() != divisor.T() || panel.n() != divisor.n())
    throw Error(ErrorCode::ShapeMismatch, "divide_by requires panels of identical shape");
  if ((divisor.values.array() == 0.0).any()) throw Error(ErrorCode::DivisionByZero, "divisor has zero entries");
  PanelMatrix out = panel;
  out.values = panel.values.cwiseQuotient(divisor.values);
  return out;
}

PanelMatrix first_difference(const PanelMatrix& panel) {
  if (panel.T() < 3) throw Error(ErrorCode::TooShort, "first difference needs T >= 3");
  PanelMatrix out;
  const Index T = panel.T();
  out.values = panel.values.bottomRows(T - 1) - panel.values.topRows(T - 1);
  out.time_labels.assign(panel.time_labels.begin() + 1, panel.time_labels.end());
  out.unit_labels = panel.unit_labels;
  return out;
}

Matrix within_transform(const Matrix& values, Effects effects) {
  Matrix out = values;
  switch (effects) {
    case Effects::None:
      break;
    case Effects::Individual:
      out.rowwise() -= column_means(values).transpose();
      break;
    case Effects::Time:
      out.colwise() -= row_means(values);
      break;
    case Effects::Twoways: {
      Vector cm = column_means(values);
      Vector rm = row_means(values);
      double g = stable_sum(values) / static_cast<double>(values.size());
      out.rowwise() -= cm.transpose();
      out.colwise() -= rm;
      out.array() += g;
      break;
    }
  }
  return out;
}

PanelMatrix within_transform(const PanelMatrix& panel, Effects effects) {
  PanelMatrix out = panel;
  out.values = within_transform(panel.values, effects);
  return out;
}

AdditiveEffects recover_additive_effects(const Matrix& residual, Effects effects, bool has_intercept) {
  const Index T = residual.rows(), n = residual.cols();
  AdditiveEffects a;
  a.alpha = Vector::Zero(n);
  a.theta = Vector::Zero(T);
  const bool intercept = has_intercept || effects == Effects::Twoways;
  if (intercept) a.mu = stable_sum(residual) / static_cast<double>(residual.size());
  if (effects == Effects::Individual || effects == Effects::Twoways)
    a.alpha = column_means(residual).array() - a.mu;
  if (effects == Effects::Time || effects == Effects::Twoways) a.theta = row_means(residual).array() - a.mu;
  return a;
}

Matrix additive_surface(const AdditiveEffects& effects, Index T, Index n) {
  Matrix s = Matrix::Constant(T, n, effects.mu);
  if (effects.alpha.size() == n) s.rowwise() += effects.alpha.transpose();
  if (effects.theta.size() == T) s.colwise() += effects.theta;
  return s;
}

}  // namespace pf
