#pragma once

#include <Eigen/Dense>
#include <string>

namespace rsca::qp {

// minimize 1/2 x'H x + g'x  s.t.  a_ineq x <= b_ineq, a_eq x = b_eq.
// The Hessian is symmetrized on construction; solve() adds a 1e-9 diagonal
// regularization so PSD-only Hessians stay strictly convex.
struct QuadraticProgram {
  Eigen::MatrixXd hess;
  Eigen::VectorXd grad;
  Eigen::MatrixXd a_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  // affine cost constant dropped by the quadratic form; carried so callers
  // can report the original objective value
  double objective_offset = 0.0;

  QuadraticProgram() = default;
  QuadraticProgram(Eigen::MatrixXd h, Eigen::VectorXd g, Eigen::MatrixXd ai,
                   Eigen::VectorXd bi, Eigen::MatrixXd ae = Eigen::MatrixXd(),
                   Eigen::VectorXd be = Eigen::VectorXd());

  int num_vars() const { return static_cast<int>(grad.size()); }
  int num_ineq() const { return static_cast<int>(b_ineq.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }

  // plain-text dump (H, g, A, b blocks) for offline cross-checking
  std::string debug_dump() const;
};

enum class QpStatus { optimal, infeasible, numerical_failure };

struct QpOutcome {
  QpStatus status = QpStatus::numerical_failure;
  Eigen::VectorXd x_opt;
  double objective = 0.0;
  // multipliers in the <=-form KKT convention:
  //   hess x + grad + a_ineq' ineq_multipliers + a_eq' eq_multipliers = 0,
  //   ineq_multipliers >= 0
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
  // Farkas-type certificate on infeasibility: y >= 0 on inequality rows with
  // y_ineq' a_ineq + y_eq' a_eq = 0 and y_ineq' b_ineq + y_eq' b_eq < 0.
  Eigen::VectorXd farkas_ineq;
  Eigen::VectorXd farkas_eq;
};

// Dual active-set method (Goldfarb–Idnani). Deterministic: fixed
// most-violated selection with lowest-index tie-breaks.
QpOutcome solve(const QuadraticProgram& qp);

struct FeasibilityReport {
  bool feasible = false;
  double total_violation = 0.0;  // phase-1 optimum
  Eigen::VectorXd witness;       // feasible point when feasible
};

// Phase-1 LP: minimize total constraint violation; feasible iff <= 1e-8.
FeasibilityReport check_feasible(const Eigen::MatrixXd& a_ineq,
                                 const Eigen::VectorXd& b_ineq,
                                 const Eigen::MatrixXd& a_eq = Eigen::MatrixXd(),
                                 const Eigen::VectorXd& b_eq = Eigen::VectorXd());

}  // namespace rsca::qp
