// SPDX-License-Identifier: MIT
#include "panelfactor/dimsel.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/factors.hpp"
#include "panelfactor/spline.hpp"
#include "panelfactor/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pf {

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> all = {
      Criterion::PC1,  Criterion::PC2,  Criterion::PC3,     Criterion::BIC3,    Criterion::IC1,   Criterion::IC2,
      Criterion::IC3,  Criterion::IPC1, Criterion::IPC2,    Criterion::IPC3,    Criterion::ABC_IC1,
      Criterion::ABC_IC2, Criterion::KSS_C, Criterion::ED, Criterion::ER, Criterion::GR};
  return all;
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::PC1: return "PC1";
    case Criterion::PC2: return "PC2";
    case Criterion::PC3: return "PC3";
    case Criterion::BIC3: return "BIC3";
    case Criterion::IC1: return "IC1";
    case Criterion::IC2: return "IC2";
    case Criterion::IC3: return "IC3";
    case Criterion::IPC1: return "IPC1";
    case Criterion::IPC2: return "IPC2";
    case Criterion::IPC3: return "IPC3";
    case Criterion::ABC_IC1: return "ABC.IC1";
    case Criterion::ABC_IC2: return "ABC.IC2";
    case Criterion::KSS_C: return "KSS.C";
    case Criterion::ED: return "ED";
    case Criterion::ER: return "ER";
    case Criterion::GR: return "GR";
  }
  return "";
}

Criterion parse_criterion(const std::string& name) {
  for (Criterion c : all_criteria())
    if (criterion_name(c) == name) return c;
  throw Error(ErrorCode::InvalidArgument, "unknown dimension criterion '" + name + "'");
}

bool is_penalized(Criterion c) {
  switch (c) {
    case Criterion::PC1:
    case Criterion::PC2:
    case Criterion::PC3:
    case Criterion::BIC3:
    case Criterion::IC1:
    case Criterion::IC2:
    case Criterion::IC3:
    case Criterion::IPC1:
    case Criterion::IPC2:
    case Criterion::IPC3:
      return true;
    default:
      return false;
  }
}

int default_d_max(Index T, Index n) {
  return static_cast<int>(std::floor(std::min(std::sqrt(static_cast<double>(n)), std::sqrt(static_cast<double>(T)))));
}

Vector eup_eigenvalues(const Matrix& W) { return covariance_eigen(W, false, Scaling::Eup).values; }

Vector tail_sums(const Vector& ev, int d_max) {
  Vector V(d_max + 1);
  const Index k = ev.size();
  // Accumulate from the smallest eigenvalue upward for accuracy.
  double acc = 0.0;
  std::vector<double> tail(static_cast<std::size_t>(k + 1), 0.0);
  for (Index r = k - 1; r >= 0; --r) {
    acc += ev(r);
    tail[static_cast<std::size_t>(r)] = acc;
  }
  for (int l = 0; l <= d_max; ++l) V(l) = l < k ? tail[static_cast<std::size_t>(l)] : 0.0;
  return V;
}

double criterion_penalty(Criterion c, double n, double T, int l) {
  const double nT = n * T;
  const double g1 = (n + T) / nT * std::log(nT / (n + T));
  const double g2 = (n + T) / nT * std::log(std::min(n, T));
  const double g3 = std::log(std::min(n, T)) / std::min(n, T);
  const double gb = (n + T - l) / nT * std::log(nT);
  const double alpha_T = T / (4.0 * std::log(std::log(T)));
  switch (c) {
    case Criterion::PC1:
    case Criterion::IC1:
      return g1;
    case Criterion::PC2:
    case Criterion::IC2:
      return g2;
    case Criterion::PC3:
    case Criterion::IC3:
      return g3;
    case Criterion::BIC3:
      return gb;
    case Criterion::IPC1:
      return alpha_T * g1;
    case Criterion::IPC2:
      return alpha_T * g2;
    case Criterion::IPC3:
      return alpha_T * gb;
    default:
      throw Error(ErrorCode::InvalidArgument, criterion_name(c) + " is not a penalised criterion");
  }
}

double criterion_value(Criterion c, double V_l, int l, double n, double T, double sig2) {
  const double g = criterion_penalty(c, n, T, l);
  if (c == Criterion::IC1 || c == Criterion::IC2 || c == Criterion::IC3)
    return std::log(std::max(V_l, 1e-300)) + l * g;
  return V_l + l * sig2 * g;
}

int select_penalized(Criterion c, const Vector& V, double n, double T, double sig2, int d_max) {
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= d_max; ++l) {
    double v = criterion_value(c, V(l), l, n, T, sig2);
    if (v < best_val) {
      best_val = v;
      best = l;
    }
  }
  return best;
}

namespace {

void check_d_max(const Matrix& W, int d_max) {
  if (d_max < 1) throw Error(ErrorCode::InvalidArgument, "d_max must be >= 1");
  if (d_max > std::min(W.rows(), W.cols()) - 1)
    throw Error(ErrorCode::DimensionTooLarge, "d_max must not exceed min(T, n) - 1");
}

DimMap penalized_block(const std::vector<Criterion>& cs, const Vector& ev, double n, double T, int d_max,
                       double sig2) {
  Vector V = tail_sums(ev, d_max);
  DimMap out;
  for (Criterion c : cs) out.emplace_back(criterion_name(c), select_penalized(c, V, n, T, sig2, d_max));
  return out;
}

Vector centered_eigenvalues(const Matrix& W) {
  Matrix C = W.array() - stable_sum(W) / static_cast<double>(W.size());
  return eup_eigenvalues(C);
}

}  // namespace

DimMap pc_bic_criteria(const Matrix& W, int d_max, std::optional<double> sig2) {
  check_d_max(W, d_max);
  Vector ev = eup_eigenvalues(W);
  double s2 = sig2 ? *sig2 : tail_sums(ev, d_max)(d_max);
  return penalized_block({Criterion::PC1, Criterion::PC2, Criterion::PC3, Criterion::BIC3}, ev,
                         static_cast<double>(W.cols()), static_cast<double>(W.rows()), d_max, s2);
}

DimMap ic_criteria(const Matrix& W, int d_max) {
  check_d_max(W, d_max);
  Vector ev = eup_eigenvalues(W);
  return penalized_block({Criterion::IC1, Criterion::IC2, Criterion::IC3}, ev, static_cast<double>(W.cols()),
                         static_cast<double>(W.rows()), d_max, 0.0);
}

DimMap ipc_criteria(const Matrix& W, int d_max, std::optional<double> sig2) {
  check_d_max(W, d_max);
  Vector ev = eup_eigenvalues(W);
  double s2 = sig2 ? *sig2 : tail_sums(ev, d_max)(d_max);
  return penalized_block({Criterion::IPC1, Criterion::IPC2, Criterion::IPC3}, ev, static_cast<double>(W.cols()),
                         static_cast<double>(W.rows()), d_max, s2);
}

Vector default_c_grid() { return Vector::LinSpaced(128, 0.0, 5.0); }

AbcResult abc_criteria(const Matrix& W, int d_max, const Vector& c_grid, std::vector<int> T_seq,
                       std::vector<int> n_seq) {
  check_d_max(W, d_max);
  const int T = static_cast<int>(W.rows()), n = static_cast<int>(W.cols());
  if (c_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "c_grid needs at least two points");
  for (Index i = 1; i < c_grid.size(); ++i)
    if (!(c_grid(i) > c_grid(i - 1))) throw Error(ErrorCode::InvalidArgument, "c_grid must be strictly increasing");
  if (T_seq.empty() && n_seq.empty()) {
    const int C = static_cast<int>(std::floor(std::min({std::sqrt(double(n)), std::sqrt(double(T)), 30.0})));
    for (int k = 0; k <= C; ++k) {
      T_seq.push_back(T - C + k);
      n_seq.push_back(n - C + k);
    }
  }
  if (T_seq.size() != n_seq.size() || T_seq.empty())
    throw Error(ErrorCode::InvalidArgument, "T_seq and n_seq must be nonempty and of equal length");
  for (std::size_t j = 0; j < T_seq.size(); ++j)
    if (T_seq[j] < d_max + 1 || T_seq[j] > T || n_seq[j] < d_max + 1 || n_seq[j] > n)
      throw Error(ErrorCode::InvalidArgument, "subpanel sizes must lie within the panel and exceed d_max");

  // Tail sums per subpanel are independent of c and of the penalty family.
  std::vector<Vector> Vs;
  for (std::size_t j = 0; j < T_seq.size(); ++j)
    Vs.push_back(tail_sums(eup_eigenvalues(W.topLeftCorner(T_seq[j], n_seq[j])), d_max));

  auto run = [&](Criterion base, bool& fallback) -> int {
    const Index G = c_grid.size();
    std::vector<int> dhat(static_cast<std::size_t>(G), -1);  // -1 = unstable
    for (Index g = 0; g < G; ++g) {
      int common = -2;
      for (std::size_t j = 0; j < T_seq.size(); ++j) {
        const double nj = n_seq[j], Tj = T_seq[j];
        const double pen = criterion_penalty(base, nj, Tj, 0);
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int l = 0; l <= d_max; ++l) {
          double v = std::log(std::max(Vs[j](l), 1e-300)) + c_grid(g) * l * pen;
          if (v < best_val) {
            best_val = v;
            best = l;
          }
        }
        if (common == -2) {
          common = best;
        } else if (common != best) {
          common = -1;
          break;
        }
      }
      dhat[static_cast<std::size_t>(g)] = common;
    }
    // Maximal runs of consecutive grid points with one common d-hat.
    std::vector<int> run_values;
    for (Index g = 0; g < G; ++g) {
      int v = dhat[static_cast<std::size_t>(g)];
      if (v < 0) continue;
      bool starts = g == 0 || dhat[static_cast<std::size_t>(g - 1)] != v;
      if (starts) run_values.push_back(v);
    }
    if (run_values.size() >= 2) {
      fallback = false;
      return run_values[1];
    }
    fallback = true;
    Vector V = tail_sums(eup_eigenvalues(W), d_max);
    return select_penalized(base, V, n, T, 0.0, d_max);
  };
  AbcResult r;
  r.ic1 = run(Criterion::IC1, r.fallback_ic1);
  r.ic2 = run(Criterion::IC2, r.fallback_ic2);
  return r;
}

ErGrResult er_gr_criteria(const Vector& ev, int d_max) {
  if (d_max < 1) throw Error(ErrorCode::InvalidArgument, "d_max must be >= 1");
  if (ev.size() < d_max + 2) throw Error(ErrorCode::DimensionTooLarge, "ER/GR need at least d_max + 2 eigenvalues");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Vector tail = tail_sums(ev, std::min<int>(static_cast<int>(ev.size()) - 1, d_max + 1));
  ErGrResult r;
  double best_er = neg_inf, best_gr = neg_inf;
  for (int l = 1; l <= d_max; ++l) {
    const double a = ev(l - 1), b = ev(l);
    double er = b > 0.0 ? a / b : (a > 0.0 ? std::numeric_limits<double>::infinity() : neg_inf);
    if (er > best_er) {
      best_er = er;
      r.er = l;
    }
    // tail(k) = sum_{r>k} rho_r (1-based rho); sum_{r>=l} rho_r = tail(l-1).
    const double t0 = tail(l - 1), t1 = tail(l), t2 = tail(l + 1);
    double gr = neg_inf;
    if (t1 > 0.0 && t2 > 0.0) {
      const double den = std::log(t1 / t2);
      if (den > 0.0) gr = std::log(t0 / t1) / den;
    } else if (t1 > 0.0) {
      gr = 0.0;
    }
    if (gr > best_gr) {
      best_gr = gr;
      r.gr = l;
    }
  }
  return r;
}

EdResult ed_criterion(const Vector& ev, int d_max) {
  if (d_max < 1) throw Error(ErrorCode::InvalidArgument, "d_max must be >= 1");
  if (ev.size() < d_max + 5) throw Error(ErrorCode::DimensionTooLarge, "ED needs at least d_max + 5 eigenvalues");
  EdResult res;
  res.converged = false;
  int j = d_max + 1;  // 1-based index of the first eigenvalue in the calibration window
  int prev = -1;
  for (int it = 1; it <= 50; ++it) {
    res.iterations = it;
    // OLS slope of rho_j..rho_{j+3} on (j-1)^{2/3}..(j+2)^{2/3}.
    Eigen::Vector4d x, y;
    for (int k = 0; k < 4; ++k) {
      x(k) = std::pow(static_cast<double>(j - 1 + k), 2.0 / 3.0);
      y(k) = ev(j - 1 + k);
    }
    const double xm = x.mean(), ym = y.mean();
    const double slope = ((x.array() - xm) * (y.array() - ym)).sum() / (x.array() - xm).square().sum();
    const double delta = 2.0 * std::abs(slope);
    int d = 0;
    for (int l = 1; l <= d_max; ++l)
      if (ev(l - 1) - ev(l) >= delta) d = l;
    res.d = d;
    if (d == prev) {
      res.converged = true;
      break;
    }
    prev = d;
    j = d + 1;
  }
  return res;
}

KssCResult kss_c_criterion(const Matrix& W, std::optional<double> kappa, std::optional<double> sig2, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const Index T = W.rows(), n = W.cols();
  SplineSystem sys(T);
  KssCResult res;
  if (kappa) {
    res.kappa = *kappa;
  } else {
    GcvResult g = sys.gcv_select(W);
    if (g.degenerate) {
      res.d = 0;
      res.kappa = g.kappa;
      return res;
    }
    res.kappa = g.kappa;
  }
  const Matrix Z = sys.smoother_matrix(res.kappa);
  const Matrix IZ = Matrix::Identity(T, T) - Z;
  const Matrix Vt = Z * W;
  EigenDecomposition eig = symmetric_eigen(Vt * Vt.transpose() / static_cast<double>(n));
  res.sig2 = sig2 ? *sig2 : (IZ * W).squaredNorm() / ((static_cast<double>(n) - 1.0) * (IZ * IZ).trace());
  if (!(res.sig2 > 0.0)) throw Error(ErrorCode::DegenerateVariance, "KSS.C residual variance is not positive");
  const double z = stats::normal_quantile(1.0 - level);
  const double N = static_cast<double>(n) * static_cast<double>(T);
  Vector tail = tail_sums(eig.values, static_cast<int>(T) - 1);
  const int cap = static_cast<int>(std::min(T, n)) - 1;
  for (int d = 0; d <= cap; ++d) {
    Matrix G = eig.vectors.leftCols(d);
    const Matrix ZG = Z * G;
    const Matrix M = Z * Z - ZG * ZG.transpose();
    const double trM = M.trace();
    const double trM2 = (M * M).trace();
    const double stat = (static_cast<double>(n) * tail(d) - (static_cast<double>(n) - 1.0) * res.sig2 * trM) /
                        (res.sig2 * std::sqrt(2.0 * N * trM2));
    res.statistics.push_back(stat);
    if (stat <= z) {
      res.d = d;
      return res;
    }
  }
  res.d = cap;
  res.capped = true;
  return res;
}

int DimReport::at(const std::string& name) const {
  for (const auto& [k, v] : dims)
    if (k == name) return v;
  throw Error(ErrorCode::InvalidArgument, "criterion '" + name + "' not in report");
}

DimReport opt_dim(const Matrix& W0, const DimConfig& config) {
  if (!W0.allFinite()) throw Error(ErrorCode::NonFinite, "panel contains non-finite values");
  const Matrix W = config.standardize ? standardize_panel(W0) : W0;
  const Index T = W.rows(), n = W.cols();
  const double dn = static_cast<double>(n), dT = static_cast<double>(T);
  DimReport rep;
  rep.d_max_used = config.d_max ? *config.d_max : default_d_max(T, n);
  const int d_max = rep.d_max_used;
  check_d_max(W, d_max);
  const std::vector<Criterion>& crit = config.criteria.empty() ? all_criteria() : config.criteria;

  const Vector ev = eup_eigenvalues(W);
  rep.eigen_shares = ev / ev.sum();
  const Vector V = tail_sums(ev, d_max);
  rep.sig2_used = config.sig2_hat ? *config.sig2_hat : V(d_max);

  std::optional<Vector> ev_centered;
  auto centered = [&]() -> const Vector& {
    if (!ev_centered) ev_centered = centered_eigenvalues(W);
    return *ev_centered;
  };
  std::optional<AbcResult> abc;
  std::optional<ErGrResult> ergr;

  for (Criterion c : crit) {
    const std::string name = criterion_name(c);
    int d = 0;
    if (is_penalized(c)) {
      d = select_penalized(c, V, dn, dT, rep.sig2_used, d_max);
    } else if (c == Criterion::ABC_IC1 || c == Criterion::ABC_IC2) {
      if (!abc) {
        abc = abc_criteria(W, d_max, config.c_grid, config.T_seq, config.n_seq);
        if (abc->fallback_ic1) rep.flags.push_back("ABC.IC1: no second stability interval, fell back to IC1");
        if (abc->fallback_ic2) rep.flags.push_back("ABC.IC2: no second stability interval, fell back to IC2");
      }
      d = c == Criterion::ABC_IC1 ? abc->ic1 : abc->ic2;
    } else if (c == Criterion::ER || c == Criterion::GR) {
      if (!ergr) {
        if (d_max > std::min(T, n) - 2) throw Error(ErrorCode::DimensionTooLarge, "ER/GR need d_max <= min(T,n)-2");
        ergr = er_gr_criteria(centered(), d_max);
      }
      d = c == Criterion::ER ? ergr->er : ergr->gr;
    } else if (c == Criterion::ED) {
      EdResult e = ed_criterion(centered(), d_max);
      if (!e.converged) rep.flags.push_back("ED: threshold iteration did not converge in 50 steps");
      d = e.d;
    } else if (c == Criterion::KSS_C) {
      std::optional<double> s2 = config.sig2_hat;
      KssCResult k = kss_c_criterion(W, config.spar, s2, config.level);
      rep.sig2_kss = k.sig2;
      rep.kappa_kss = k.kappa;
      if (k.capped) rep.flags.push_back("KSS.C: no non-rejection before min(T,n)-1");
      d = k.d;
    }
    rep.dims.emplace_back(name, d);
  }
  return rep;
}

}  // namespace pf
