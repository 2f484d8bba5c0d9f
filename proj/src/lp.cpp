#include "rsca/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rsca::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kPhase1Tol = 1e-9;
// consecutive degenerate pivots before falling back to Bland's rule
constexpr int kStallLimit = 30;

struct Tableau {
  Eigen::MatrixXd t;        // m x (n_total + 1), last column is rhs
  std::vector<int> basis;   // basic variable per row
  int rows = 0;
  int cols = 0;  // decision columns (excluding rhs)

  double rhs(int r) const { return t(r, cols); }
};

void pivot(Tableau& tab, int pr, int pc) {
  const double piv = tab.t(pr, pc);
  tab.t.row(pr) /= piv;
  for (int r = 0; r < tab.rows; ++r) {
    if (r == pr) continue;
    const double f = tab.t(r, pc);
    if (std::abs(f) > 0.0) tab.t.row(r) -= f * tab.t.row(pr);
  }
  tab.basis[pr] = pc;
}

// Simplex iteration on minimize obj_row * y over current tableau.
// obj is a working row of reduced costs (length cols+1, last entry = -value).
// allowed(j) restricts which columns may enter.
enum class IterOutcome { optimal, unbounded, failure };

IterOutcome iterate(Tableau& tab, Eigen::RowVectorXd& obj,
                    const std::vector<char>& allowed) {
  const int max_iters = 200 * (tab.rows + tab.cols) + 2000;
  int stall = 0;
  bool bland = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    // entering column
    int pc = -1;
    if (!bland) {
      double best = -kCostTol;
      for (int j = 0; j < tab.cols; ++j) {
        if (!allowed[j]) continue;
        if (obj(j) < best) { best = obj(j); pc = j; }
      }
    } else {
      for (int j = 0; j < tab.cols; ++j) {
        if (allowed[j] && obj(j) < -kCostTol) { pc = j; break; }
      }
    }
    if (pc < 0) return IterOutcome::optimal;

    // ratio test, Bland tie-break on the leaving basic variable index
    int pr = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < tab.rows; ++r) {
      const double a = tab.t(r, pc);
      if (a <= kPivotTol) continue;
      const double ratio = tab.rhs(r) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && pr >= 0 &&
           tab.basis[r] < tab.basis[pr])) {
        best_ratio = ratio;
        pr = r;
      }
    }
    if (pr < 0) return IterOutcome::unbounded;

    const bool degenerate = best_ratio < 1e-12;
    stall = degenerate ? stall + 1 : 0;
    if (stall > kStallLimit) bland = true;
    if (!degenerate) bland = false;

    const double f = obj(pc);
    pivot(tab, pr, pc);
    obj -= f * tab.t.row(pr);
    obj(pc) = 0.0;
  }
  return IterOutcome::failure;
}

}  // namespace

Result solve_standard(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_eq,
                      const Eigen::VectorXd& b_eq) {
  const int m = static_cast<int>(a_eq.rows());
  const int n = static_cast<int>(a_eq.cols());
  Result res;

  if (m == 0) {
    // minimize c'y over y >= 0: bounded iff c >= 0, minimum at y = 0
    res.x = Eigen::VectorXd::Zero(n);
    res.objective = 0.0;
    res.status = (c.minCoeff() < -kCostTol && n > 0) ? Status::unbounded
                                                     : Status::optimal;
    if (n == 0) res.status = Status::optimal;
    return res;
  }

  Tableau tab;
  tab.rows = m;
  tab.cols = n + m;  // originals + artificials
  tab.t.setZero(m, tab.cols + 1);
  tab.basis.assign(m, -1);
  for (int r = 0; r < m; ++r) {
    const double sgn = (b_eq(r) < 0.0) ? -1.0 : 1.0;
    tab.t.block(r, 0, 1, n) = sgn * a_eq.row(r);
    tab.t(r, n + r) = 1.0;
    tab.t(r, tab.cols) = sgn * b_eq(r);
    tab.basis[r] = n + r;
  }

  // phase 1: minimize sum of artificials
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(tab.cols + 1);
  for (int r = 0; r < m; ++r) obj -= tab.t.row(r);  // reduced costs of sum(artificials)
  for (int r = 0; r < m; ++r) obj(n + r) = 0.0;
  std::vector<char> allowed(tab.cols, 1);

  IterOutcome out = iterate(tab, obj, allowed);
  if (out == IterOutcome::failure) return res;
  const double phase1 = -obj(tab.cols);
  if (phase1 > kPhase1Tol) {
    res.status = Status::infeasible;
    res.objective = phase1;
    return res;
  }

  // drive artificials out of the basis where a pivot exists
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] < n) continue;
    int pc = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.t(r, j)) > 1e-9) { pc = j; break; }
    }
    if (pc >= 0) pivot(tab, r, pc);
    // otherwise the row is redundant; the artificial stays basic at zero
  }

  // phase 2: artificials may not re-enter
  for (int j = n; j < tab.cols; ++j) allowed[j] = 0;
  obj.setZero(tab.cols + 1);
  obj.head(n) = c.transpose();
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis[r];
    if (b < n && std::abs(c(b)) > 0.0) obj -= c(b) * tab.t.row(r);
  }
  for (int r = 0; r < m; ++r) obj(tab.basis[r]) = 0.0;

  out = iterate(tab, obj, allowed);
  if (out == IterOutcome::failure) return res;
  if (out == IterOutcome::unbounded) {
    res.status = Status::unbounded;
    return res;
  }

  res.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] < n) res.x(tab.basis[r]) = tab.rhs(r);
  }
  res.objective = c.dot(res.x);
  res.status = Status::optimal;
  return res;
}

Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  // variables [x+, x-, slack]
  Eigen::MatrixXd eq(m, 2 * n + m);
  eq << a, -a, Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(2 * n + m);
  cost.head(n) = -c;
  cost.segment(n, n) = c;
  Result inner = solve_standard(cost, eq, b);
  Result res;
  res.status = inner.status;
  if (inner.status == Status::optimal) {
    res.x = inner.x.head(n) - inner.x.segment(n, n);
    res.objective = c.dot(res.x);
  }
  return res;
}

Result support_lp(const Eigen::VectorXd& d, const Eigen::MatrixXd& h_mat,
                  const Eigen::VectorXd& h_vec) {
  const int m = static_cast<int>(h_mat.rows());
  const int dim = static_cast<int>(h_mat.cols());
  Result res;

  // dual: min h'y s.t. H'y = d, y >= 0
  Result dual = solve_standard(h_vec, h_mat.transpose(), d);
  if (dual.status == Status::optimal) {
    res.status = Status::optimal;
    res.objective = dual.objective;
    // recover a maximizer from the tight rows of the dual solution
    std::vector<int> active;
    for (int i = 0; i < m; ++i) {
      if (dual.x(i) > 1e-10) active.push_back(i);
    }
    if (!active.empty()) {
      Eigen::MatrixXd ha(active.size(), dim);
      Eigen::VectorXd hb(active.size());
      for (size_t i = 0; i < active.size(); ++i) {
        ha.row(static_cast<int>(i)) = h_mat.row(active[i]);
        hb(static_cast<int>(i)) = h_vec(active[i]);
      }
      res.x = ha.colPivHouseholderQr().solve(hb);
      if ((ha * res.x - hb).lpNorm<Eigen::Infinity>() > 1e-7) res.x.resize(0);
    }
    return res;
  }
  if (dual.status == Status::unbounded) {
    // unbounded dual <=> empty primal polytope
    res.status = Status::infeasible;
    return res;
  }
  if (dual.status == Status::infeasible) {
    // primal is unbounded in direction d, or empty; disambiguate
    res.status = halfspace_system_empty(h_mat, h_vec) ? Status::infeasible
                                                      : Status::unbounded;
    return res;
  }
  return res;
}

bool halfspace_system_empty(const Eigen::MatrixXd& h_mat,
                            const Eigen::VectorXd& h_vec) {
  const int m = static_cast<int>(h_mat.rows());
  const int dim = static_cast<int>(h_mat.cols());
  if (m == 0) return false;
  // Farkas: empty <=> exists y >= 0 with H'y = 0, h'y < 0.
  // Normalize with 1'y = 1 and minimize h'y.
  Eigen::MatrixXd eq(dim + 1, m);
  eq.topRows(dim) = h_mat.transpose();
  eq.bottomRows(1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 1);
  rhs(dim) = 1.0;
  Result r = solve_standard(h_vec, eq, rhs);
  if (r.status == Status::infeasible) return false;  // no such y at all
  if (r.status == Status::optimal) return r.objective < -1e-9;
  if (r.status == Status::unbounded) return true;
  return false;
}

}  // namespace rsca::lp
