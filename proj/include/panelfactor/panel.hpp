// SPDX-License-Identifier: MIT
/**
 * @file panel.hpp
 * @brief Balanced panel data model and deterministic transformations.
 *
 * A panel variable is stored as a T x n matrix (rows = time periods,
 * columns = individuals). All transformations are pure functions.
 */
#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace pf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One panel variable: T x n values plus axis labels.
struct PanelMatrix {
  Matrix values;
  std::vector<std::string> time_labels;
  std::vector<std::string> unit_labels;

  Index T() const { return values.rows(); }
  Index n() const { return values.cols(); }

  /// Builds a panel with default labels "1".."T" / "1".."n".
  static PanelMatrix from_values(Matrix values);
  /// Builds a panel and checks all invariants (shape, T>=2, n>=2, unique labels, finite).
  static PanelMatrix make(Matrix values, std::vector<std::string> time_labels,
                          std::vector<std::string> unit_labels);
  /// Throws pf::Error if an invariant is violated.
  void validate() const;
};

/// Kinds of classical additive effects.
enum class Effects { None, Individual, Time, Twoways };

Effects parse_effects(const std::string& name);
std::string to_string(Effects effects);

/// Response plus named regressors sharing one grid.
struct PanelSet {
  PanelMatrix response;
  std::vector<std::string> regressor_names;
  std::vector<PanelMatrix> regressors;
  bool has_intercept = true;

  Index T() const { return response.T(); }
  Index n() const { return response.n(); }
  Index P() const { return static_cast<Index>(regressors.size()); }
  /// Checks equal shapes/labels and unique, non-reserved regressor names.
  void validate() const;
};

/// Additive effects y = mu + alpha_i + theta_t recovered after estimation.
struct AdditiveEffects {
  double mu = 0.0;
  Vector alpha;  ///< length n
  Vector theta;  ///< length T
};

/// Options for long-format CSV ingestion.
struct CsvOptions {
  char delimiter = ',';
};

/**
 * Reads a long-format CSV (one row per (id, time) pair) and pivots each value
 * column into a T x n panel. Rows are sorted by time, columns by id; labels
 * that all parse as numbers are ordered numerically, otherwise lexically.
 */
std::map<std::string, PanelMatrix> load_long_csv(const std::string& path, const std::string& id_col,
                                                 const std::string& time_col,
                                                 const std::vector<std::string>& value_cols,
                                                 const CsvOptions& options = {});

/// Same as load_long_csv but parses CSV text held in memory.
std::map<std::string, PanelMatrix> parse_long_csv(const std::string& text, const std::string& id_col,
                                                  const std::string& time_col,
                                                  const std::vector<std::string>& value_cols,
                                                  const CsvOptions& options = {});

/// Writes a wide CSV: first column time label, remaining columns unit labels.
void write_wide_csv(const PanelMatrix& panel, const std::string& path);
/// Serialises a panel to wide CSV text (17 significant digits, round-trip exact).
std::string to_wide_csv(const PanelMatrix& panel);
/// Parses wide CSV text produced by to_wide_csv.
PanelMatrix parse_wide_csv(const std::string& text);
PanelMatrix read_wide_csv(const std::string& path);

/// Cell-wise natural logarithm; requires strictly positive entries.
PanelMatrix log_panel(const PanelMatrix& panel);
/// Cell-wise division by a panel of identical shape with nonzero entries.
PanelMatrix divide_panel(const PanelMatrix& panel, const PanelMatrix& divisor);
/// Row t of the result is row t+1 minus row t of the input; needs T >= 3.
PanelMatrix first_difference(const PanelMatrix& panel);
/// Classical within transformation for the given effects.
PanelMatrix within_transform(const PanelMatrix& panel, Effects effects);
/// Matrix form of within_transform.
Matrix within_transform(const Matrix& values, Effects effects);

/**
 * Recovers mu, alpha_i, theta_t from a residual panel Y - X beta.
 * mu is the grand mean when has_intercept (or for twoways), alpha_i the
 * column mean minus mu, theta_t the row mean minus mu (only for the effects
 * present). Sum of alpha and of theta is zero whenever mu is estimated.
 */
AdditiveEffects recover_additive_effects(const Matrix& residual, Effects effects, bool has_intercept);

/// Returns the T x n surface mu + alpha_i + theta_t.
Matrix additive_surface(const AdditiveEffects& effects, Index T, Index n);

/// Compensated (Kahan-Neumaier) sum of all entries.
double stable_sum(const Matrix& m);
/// Column means / row means with compensated summation.
Vector column_means(const Matrix& m);
Vector row_means(const Matrix& m);

}  // namespace pf
