#include "rsca/qp.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "rsca/lp.hpp"

namespace rsca::qp {

namespace {

constexpr double kReg = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Givens-based update machinery of the dual active-set method. J = L^-T Q and
// R hold an implicit QR factorization of the active constraint normals in the
// metric of the Hessian.
void apply_givens(Eigen::MatrixXd& j_mat, Eigen::VectorXd& d, int iq) {
  const int n = static_cast<int>(d.size());
  for (int j = n - 1; j >= iq + 1; --j) {
    double cc = d(j - 1);
    double ss = d(j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    d(j) = 0.0;
    ss = ss / h;
    cc = cc / h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d(j - 1) = -h;
    } else {
      d(j - 1) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = 0; k < n; ++k) {
      const double t1 = j_mat(k, j - 1);
      const double t2 = j_mat(k, j);
      j_mat(k, j - 1) = t1 * cc + t2 * ss;
      j_mat(k, j) = xny * (t1 + j_mat(k, j - 1)) - t2;
    }
  }
}

bool add_constraint(Eigen::MatrixXd& r_mat, Eigen::MatrixXd& j_mat,
                    Eigen::VectorXd& d, int& iq, double& r_norm) {
  apply_givens(j_mat, d, iq);
  r_mat.col(iq).head(iq + 1) = d.head(iq + 1);
  ++iq;
  if (std::abs(d(iq - 1)) <= 1e-13 * r_norm) return false;
  r_norm = std::max(r_norm, std::abs(d(iq - 1)));
  return true;
}

void delete_constraint(Eigen::MatrixXd& r_mat, Eigen::MatrixXd& j_mat,
                       std::vector<int>& active, Eigen::VectorXd& u, int& iq,
                       int pos) {
  const int n = static_cast<int>(j_mat.rows());
  // shift columns left
  for (int i = pos; i < iq - 1; ++i) {
    active[i] = active[i + 1];
    u(i) = u(i + 1);
    r_mat.col(i) = r_mat.col(i + 1);
  }
  active[iq - 1] = 0;
  u(iq - 1) = 0.0;
  r_mat.col(iq - 1).setZero();
  --iq;
  if (iq == 0) return;
  // restore triangularity of R with Givens rotations
  for (int j = pos; j < iq; ++j) {
    double cc = r_mat(j, j);
    double ss = r_mat(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    cc = cc / h;
    ss = ss / h;
    r_mat(j + 1, j) = 0.0;
    if (cc < 0.0) {
      r_mat(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      r_mat(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < iq; ++k) {
      const double t1 = r_mat(j, k);
      const double t2 = r_mat(j + 1, k);
      r_mat(j, k) = t1 * cc + t2 * ss;
      r_mat(j + 1, k) = xny * (t1 + r_mat(j, k)) - t2;
    }
    for (int k = 0; k < n; ++k) {
      const double t1 = j_mat(k, j);
      const double t2 = j_mat(k, j + 1);
      j_mat(k, j) = t1 * cc + t2 * ss;
      j_mat(k, j + 1) = xny * (j_mat(k, j) + t1) - t2;
    }
  }
}

}  // namespace

QuadraticProgram::QuadraticProgram(Eigen::MatrixXd h, Eigen::VectorXd g,
                                   Eigen::MatrixXd ai, Eigen::VectorXd bi,
                                   Eigen::MatrixXd ae, Eigen::VectorXd be)
    : hess(std::move(h)),
      grad(std::move(g)),
      a_ineq(std::move(ai)),
      b_ineq(std::move(bi)),
      a_eq(std::move(ae)),
      b_eq(std::move(be)) {
  hess = 0.5 * (hess + hess.transpose()).eval();
  if (a_ineq.size() == 0) a_ineq.resize(0, grad.size());
  if (a_eq.size() == 0) a_eq.resize(0, grad.size());
  if (hess.rows() != grad.size() || a_ineq.cols() != grad.size() ||
      a_eq.cols() != grad.size() || a_ineq.rows() != b_ineq.size() ||
      a_eq.rows() != b_eq.size()) {
    throw std::invalid_argument("QuadraticProgram: inconsistent dimensions");
  }
}

std::string QuadraticProgram::debug_dump() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "H " << num_vars() << "\n" << hess << "\ng\n" << grad.transpose()
     << "\nA_ineq " << num_ineq() << "\n" << a_ineq << "\nb_ineq\n"
     << b_ineq.transpose() << "\nA_eq " << num_eq() << "\n" << a_eq
     << "\nb_eq\n" << b_eq.transpose() << "\n";
  return os.str();
}

QpOutcome solve(const QuadraticProgram& qp) {
  const int n = qp.num_vars();
  const int mi = qp.num_ineq();
  const int me = qp.num_eq();
  QpOutcome out;

  // internal >=-form: rows n_i' x >= b_i; equalities first, then -a_ineq
  // constraint index k: k < me -> equality, else inequality k-me
  auto normal_of = [&](int k) -> Eigen::VectorXd {
    if (k < me) return qp.a_eq.row(k).transpose();
    return -qp.a_ineq.row(k - me).transpose();
  };
  auto rhs_of = [&](int k) -> double {
    if (k < me) return qp.b_eq(k);
    return -qp.b_ineq(k - me);
  };

  Eigen::MatrixXd g_mat = qp.hess;
  g_mat.diagonal().array() += kReg;
  Eigen::LLT<Eigen::MatrixXd> llt(g_mat);
  if (llt.info() != Eigen::Success) {
    return out;  // not PSD even after regularization
  }

  // J = L^-T, x = unconstrained minimum
  Eigen::MatrixXd j_mat =
      llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd x = -llt.solve(qp.grad);

  Eigen::MatrixXd r_mat = Eigen::MatrixXd::Zero(n, n);
  double r_norm = 1.0;
  std::vector<int> active(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  int iq = 0;

  const int max_iter = 10 * (mi + me + n) + 50;
  int iter = 0;

  // install equality constraints, forced active
  for (int k = 0; k < me; ++k) {
    const Eigen::VectorXd np = normal_of(k);
    Eigen::VectorXd d = j_mat.transpose() * np;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    if (iq < n) z = j_mat.rightCols(n - iq) * d.tail(n - iq);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(iq);
    if (iq > 0) {
      r = r_mat.topLeftCorner(iq, iq)
              .triangularView<Eigen::Upper>()
              .solve(d.head(iq));
    }
    const double slack = np.dot(x) - rhs_of(k);
    if (z.lpNorm<Eigen::Infinity>() <= 1e-12) {
      if (std::abs(slack) > 1e-8) {
        // equality inconsistent with the ones already installed
        out.status = QpStatus::infeasible;
        out.farkas_ineq = Eigen::VectorXd::Zero(mi);
        out.farkas_eq = Eigen::VectorXd::Zero(me);
        for (int j = 0; j < iq; ++j) out.farkas_eq(active[j]) = -r(j);
        out.farkas_eq(k) = 1.0;
        if (slack > 0) {
          out.farkas_eq = -out.farkas_eq;
        }
        return out;
      }
      continue;  // redundant equality
    }
    const double t2 = -slack / z.dot(np);
    x += t2 * z;
    u.head(iq) -= t2 * r;
    u(iq) = t2;
    active[iq] = k;
    add_constraint(r_mat, j_mat, d, iq, r_norm);
  }

  while (iter++ < max_iter) {
    // most violated inequality (lowest index on ties)
    int p = -1;
    double worst = -1e-9;
    for (int k = me; k < me + mi; ++k) {
      bool is_active = false;
      for (int j = me; j < iq; ++j) {
        if (active[j] == k) {
          is_active = true;
          break;
        }
      }
      if (is_active) continue;
      const double s = normal_of(k).dot(x) - rhs_of(k);
      if (s < worst - 1e-15) {
        worst = s;
        p = k;
      }
    }
    if (p < 0) {
      // optimal: assemble multipliers
      out.status = QpStatus::optimal;
      out.x_opt = x;
      out.objective = 0.5 * x.dot(qp.hess * x) + qp.grad.dot(x);
      out.ineq_multipliers = Eigen::VectorXd::Zero(mi);
      out.eq_multipliers = Eigen::VectorXd::Zero(me);
      for (int j = 0; j < iq; ++j) {
        if (active[j] < me) {
          out.eq_multipliers(active[j]) = -u(j);
        } else {
          out.ineq_multipliers(active[j] - me) = u(j);
        }
      }
      return out;
    }

    const Eigen::VectorXd np = normal_of(p);
    double u_plus = 0.0;
    double slack = np.dot(x) - rhs_of(p);

    while (iter++ < max_iter) {
      Eigen::VectorXd d = j_mat.transpose() * np;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      if (iq < n) z = j_mat.rightCols(n - iq) * d.tail(n - iq);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(iq);
      if (iq > 0) {
        r = r_mat.topLeftCorner(iq, iq)
                .triangularView<Eigen::Upper>()
                .solve(d.head(iq));
      }

      // partial step length (blocking active inequality)
      double t1 = kInf;
      int blocker = -1;
      for (int j = me; j < iq; ++j) {
        if (r(j) > 1e-13) {
          const double t = u(j) / r(j);
          if (t < t1 - 1e-15 ||
              (t < t1 + 1e-15 && blocker >= 0 && active[j] < active[blocker])) {
            t1 = t;
            blocker = j;
          }
        }
      }
      const bool z_zero = z.lpNorm<Eigen::Infinity>() <= 1e-12;
      const double t2 = z_zero ? kInf : -slack / z.dot(np);
      const double t = std::min(t1, t2);

      if (t >= kInf) {
        // dual unbounded: the QP is infeasible; (r, 1) is a Farkas ray
        out.status = QpStatus::infeasible;
        out.farkas_ineq = Eigen::VectorXd::Zero(mi);
        out.farkas_eq = Eigen::VectorXd::Zero(me);
        for (int j = 0; j < iq; ++j) {
          if (active[j] < me) out.farkas_eq(active[j]) = -r(j);
          else out.farkas_ineq(active[j] - me) = -r(j);
        }
        out.farkas_ineq(p - me) = 1.0;
        return out;
      }

      if (z_zero || t2 >= kInf) {
        // dual step only: drop the blocker and retry
        u.head(iq) -= t * r;
        u_plus += t;
        delete_constraint(r_mat, j_mat, active, u, iq, blocker);
        continue;
      }

      // primal step
      x += t * z;
      u.head(iq) -= t * r;
      u_plus += t;
      slack = np.dot(x) - rhs_of(p);

      if (t == t2) {
        // full step: p becomes active
        u(iq) = u_plus;
        active[iq] = p;
        if (!add_constraint(r_mat, j_mat, d, iq, r_norm)) {
          // degenerate normal; treat as numerical failure
          out.status = QpStatus::numerical_failure;
          return out;
        }
        break;
      }
      // partial step: drop blocker, stay on constraint p
      delete_constraint(r_mat, j_mat, active, u, iq, blocker);
    }
  }

  if (iter >= max_iter) {
    out.status = QpStatus::numerical_failure;
  }
  return out;
}

FeasibilityReport check_feasible(const Eigen::MatrixXd& a_ineq,
                                 const Eigen::VectorXd& b_ineq,
                                 const Eigen::MatrixXd& a_eq,
                                 const Eigen::VectorXd& b_eq) {
  const int mi = static_cast<int>(b_ineq.size());
  const int me = static_cast<int>(b_eq.size());
  int n = 0;
  if (a_ineq.size() > 0) n = static_cast<int>(a_ineq.cols());
  if (a_eq.size() > 0) n = std::max(n, static_cast<int>(a_eq.cols()));

  FeasibilityReport rep;
  if (mi + me == 0) {
    rep.feasible = true;
    rep.witness = Eigen::VectorXd::Zero(n);
    return rep;
  }

  // variables: [x+ (n), x- (n), v (mi), s (mi), w+ (me), w- (me)]
  //   a_ineq x - v + s = b_ineq,  a_eq x + w- - w+ = b_eq, all vars >= 0
  // minimize sum(v) + sum(w+) + sum(w-)
  const int nv = 2 * n + 2 * mi + 2 * me;
  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(mi + me, nv);
  Eigen::VectorXd rhs(mi + me);
  if (mi > 0) {
    eq.block(0, 0, mi, n) = a_ineq;
    eq.block(0, n, mi, n) = -a_ineq;
    eq.block(0, 2 * n, mi, mi) = -Eigen::MatrixXd::Identity(mi, mi);
    eq.block(0, 2 * n + mi, mi, mi) = Eigen::MatrixXd::Identity(mi, mi);
    rhs.head(mi) = b_ineq;
  }
  if (me > 0) {
    eq.block(mi, 0, me, n) = a_eq;
    eq.block(mi, n, me, n) = -a_eq;
    eq.block(mi, 2 * n + 2 * mi, me, me) = Eigen::MatrixXd::Identity(me, me);
    eq.block(mi, 2 * n + 2 * mi + me, me, me) =
        -Eigen::MatrixXd::Identity(me, me);
    rhs.tail(me) = b_eq;
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  cost.segment(2 * n, mi).setOnes();
  cost.segment(2 * n + 2 * mi, 2 * me).setOnes();

  lp::Result r = lp::solve_standard(cost, eq, rhs);
  if (r.status != lp::Status::optimal) {
    // the phase-1 problem is always feasible and bounded below by 0
    rep.feasible = false;
    rep.total_violation = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.total_violation = r.objective;
  rep.feasible = (r.objective <= 1e-8);
  rep.witness = r.x.head(n) - r.x.segment(n, n);
  return rep;
}

}  // namespace rsca::qp
