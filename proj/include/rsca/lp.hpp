#pragma once

#include <Eigen/Dense>

namespace rsca::lp {

enum class Status { optimal, infeasible, unbounded, failure };

struct Result {
  Status status = Status::failure;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// minimize c'y  s.t.  a_eq y = b_eq, y >= 0
// Two-phase dense simplex. Dantzig pricing with automatic switch to Bland's
// rule when pivots stall, so the iteration cannot cycle.
Result solve_standard(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_eq,
                      const Eigen::VectorXd& b_eq);

// maximize c'x  s.t.  a x <= b, x free (handled by variable splitting)
Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                const Eigen::VectorXd& b);

// max d'x over {x : h_mat x <= h_vec}, solved through the LP dual
// (min h_vec'y s.t. h_mat'y = d, y >= 0). Much cheaper than `maximize`
// when the row count far exceeds the dimension. The returned x is a
// maximizer recovered from the optimal dual basis when that basis is
// nonsingular; the objective value is always valid.
//   status == unbounded  -> the polytope is unbounded in direction d
//   status == infeasible -> the polytope is empty
Result support_lp(const Eigen::VectorXd& d, const Eigen::MatrixXd& h_mat,
                  const Eigen::VectorXd& h_vec);

// Farkas emptiness test for {x : h_mat x <= h_vec}.
bool halfspace_system_empty(const Eigen::MatrixXd& h_mat,
                            const Eigen::VectorXd& h_vec);

}  // namespace rsca::lp
