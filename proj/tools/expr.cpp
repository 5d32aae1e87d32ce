// SPDX-License-Identifier: MIT
#include "expr.hpp"

#include "panelfactor/errors.hpp"

#include <algorithm>
#include <cctype>

namespace pf::cli {

namespace {

const int kMaxDepth = 64;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'; }

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::shared_ptr<Expr> parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }

 private:
  std::shared_ptr<Expr> expr() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a variable name");
    auto e = std::make_shared<Expr>();
    const std::string word = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      e->op = word;
      while (true) {
        e->args.push_back(expr());
        skip();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      check_arity(*e);
    } else {
      e->name = word;
    }
    return e;
  }

  void check_arity(const Expr& e) {
    const std::size_t want = (e.op == "log" || e.op == "diff") ? 1 : (e.op == "deflate" || e.op == "within") ? 2 : 0;
    if (want == 0) fail("unknown function '" + e.op + "' (log, deflate, diff, within)");
    if (e.args.size() != want) fail(e.op + " takes " + std::to_string(want) + " argument(s)");
    if (e.op == "within" && !e.args[1]->op.empty()) fail("within: second argument must be an effects kind");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::InvalidArgument, "expression '" + s_ + "': " + msg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Expr::str() const {
  if (op.empty()) return name;
  std::string s = op + "(";
  for (std::size_t k = 0; k < args.size(); ++k) s += (k ? "," : "") + args[k]->str();
  return s + ")";
}

std::shared_ptr<Expr> parse_expr(const std::string& text) { return Parser(text).parse(); }

std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  for (const auto& s : out)
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty entry in list '" + text + "'");
  return out;
}

void Workspace::define(const std::string& definition) {
  const auto eq = definition.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--derive expects NAME=EXPR, got '" + definition + "'");
  const std::string name = trim(definition.substr(0, eq));
  if (name.empty() || !std::all_of(name.begin(), name.end(), ident_char))
    throw Error(ErrorCode::InvalidArgument, "invalid variable name '" + name + "'");
  if (parsed_defs_.count(name)) throw Error(ErrorCode::InvalidArgument, "variable '" + name + "' defined twice");
  const std::string body = trim(definition.substr(eq + 1));
  parsed_defs_[name] = parse_expr(body);
  defs_.emplace_back(name, body);
}

void Workspace::add_wide(const std::string& name, const std::string& path) { wide_[name] = path; }

void Workspace::set_long_csv(std::string path, std::string id_col, std::string time_col, char delimiter) {
  csv_path_ = std::move(path);
  id_col_ = std::move(id_col);
  time_col_ = std::move(time_col);
  delimiter_ = delimiter;
}

void Workspace::collect(const Expr& e, std::vector<std::string>& leaves, int depth) const {
  if (depth > kMaxDepth) throw Error(ErrorCode::InvalidArgument, "variable definitions are circular");
  if (e.op.empty()) {
    auto it = parsed_defs_.find(e.name);
    if (it != parsed_defs_.end()) {
      collect(*it->second, leaves, depth + 1);
    } else if (!wide_.count(e.name) && std::find(leaves.begin(), leaves.end(), e.name) == leaves.end()) {
      leaves.push_back(e.name);
    }
    return;
  }
  collect(*e.args[0], leaves, depth + 1);
  if (e.op == "deflate") collect(*e.args[1], leaves, depth + 1);
}

void Workspace::load(const std::vector<std::string>& expressions) {
  std::vector<std::string> leaves;
  for (const auto& x : expressions) collect(*parse_expr(x), leaves, 0);
  std::vector<std::string> missing;
  for (const auto& l : leaves)
    if (!columns_.count(l)) missing.push_back(l);
  if (missing.empty()) return;
  if (csv_path_.empty())
    throw Error(ErrorCode::MissingCell, "variable '" + missing.front() + "' is not defined and no --data file is given");
  CsvOptions opt;
  opt.delimiter = delimiter_;
  auto cols = load_long_csv(csv_path_, id_col_, time_col_, missing, opt);
  for (auto& [k, v] : cols) columns_[k] = std::move(v);
}

PanelMatrix Workspace::eval(const Expr& e, int depth) {
  if (depth > kMaxDepth) throw Error(ErrorCode::InvalidArgument, "variable definitions are circular");
  if (e.op.empty()) {
    if (auto it = parsed_defs_.find(e.name); it != parsed_defs_.end()) return eval(*it->second, depth + 1);
    if (auto it = wide_.find(e.name); it != wide_.end()) return read_wide_csv(it->second);
    if (auto it = columns_.find(e.name); it != columns_.end()) return it->second;
    load({e.name});
    return columns_.at(e.name);
  }
  if (e.op == "log") return log_panel(eval(*e.args[0], depth + 1));
  if (e.op == "diff") return first_difference(eval(*e.args[0], depth + 1));
  if (e.op == "deflate") return divide_panel(eval(*e.args[0], depth + 1), eval(*e.args[1], depth + 1));
  return within_transform(eval(*e.args[0], depth + 1), parse_effects(e.args[1]->name));
}

PanelMatrix Workspace::evaluate(const std::string& expression) { return eval(*parse_expr(expression), 0); }

void Workspace::flatten(const Expr& e, std::vector<Step>& out, int depth) const {
  if (depth > kMaxDepth) throw Error(ErrorCode::InvalidArgument, "variable definitions are circular");
  if (e.op.empty()) {
    if (auto it = parsed_defs_.find(e.name); it != parsed_defs_.end()) {
      flatten(*it->second, out, depth + 1);
      return;
    }
    out.push_back({"source", wide_.count(e.name) ? "wide:" + wide_.at(e.name) : e.name});
    return;
  }
  flatten(*e.args[0], out, depth + 1);
  if (e.op == "deflate") {
    std::string by = e.args[1]->str();
    out.push_back({"deflate", by});
  } else if (e.op == "within") {
    out.push_back({"within", e.args[1]->name});
  } else {
    out.push_back({e.op, ""});
  }
}

std::vector<Step> Workspace::steps(const std::string& expression) const {
  std::vector<Step> out;
  flatten(*parse_expr(expression), out, 0);
  return out;
}

}  // namespace pf::cli
