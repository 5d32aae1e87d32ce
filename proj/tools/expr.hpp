// SPDX-License-Identifier: MIT
/**
 * @file expr.hpp
 * @brief Variable expressions of the command-line tool.
 *
 * A variable is a long-CSV column, a wide-CSV panel registered with --wide, a
 * name defined by --derive NAME=EXPR, or an expression composed of
 *   log(x)  deflate(x, by)  diff(x)  within(x, effects)
 * e.g. diff(log(deflate(price, cpi))).
 */
#pragma once

#include "panelfactor/panel.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pf::cli {

struct Expr {
  std::string op;                           ///< empty for a plain identifier
  std::string name;                         ///< identifier, or literal argument (effects kind)
  std::vector<std::shared_ptr<Expr>> args;

  std::string str() const;
};

std::shared_ptr<Expr> parse_expr(const std::string& text);

/// Splits at top-level commas (commas inside parentheses are kept).
std::vector<std::string> split_top_level(const std::string& text);

/// One step of a derivation, in evaluation order (for provenance manifests).
struct Step {
  std::string op;
  std::string argument;
};

class Workspace {
 public:
  /// Registers `NAME=EXPR` definitions (later definitions may use earlier ones).
  void define(const std::string& definition);
  void add_wide(const std::string& name, const std::string& path);
  void set_long_csv(std::string path, std::string id_col, std::string time_col, char delimiter);

  /// Loads every long-CSV column referenced by the given expressions.
  void load(const std::vector<std::string>& expressions);

  PanelMatrix evaluate(const std::string& expression);
  /// Leaf-to-root steps applied to obtain the expression, with the source variable first.
  std::vector<Step> steps(const std::string& expression) const;
  const std::vector<std::pair<std::string, std::string>>& definitions() const { return defs_; }

 private:
  PanelMatrix eval(const Expr& e, int depth);
  void collect(const Expr& e, std::vector<std::string>& leaves, int depth) const;
  void flatten(const Expr& e, std::vector<Step>& out, int depth) const;

  std::vector<std::pair<std::string, std::string>> defs_;
  std::map<std::string, std::shared_ptr<Expr>> parsed_defs_;
  std::map<std::string, std::string> wide_;
  std::map<std::string, PanelMatrix> columns_;
  std::string csv_path_, id_col_, time_col_;
  char delimiter_ = ',';
};

}  // namespace pf::cli
