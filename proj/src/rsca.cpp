#include "rsca/rsca.hpp"

#include <cmath>
#include <stdexcept>

namespace rsca::arch {

namespace {

constexpr double kPrecheckTol = 1e-9;

// Incremental condensed-MPC assembly: stage maps x_i = X_i z + c_i over the
// decision vector, plus quadratic-cost accumulation.
struct Condenser {
  Eigen::MatrixXd x_map;   // 4 x nv, current stage
  Eigen::Vector4d x_off;   // affine part, current stage
  Eigen::MatrixXd hess;
  Eigen::VectorXd grad;
  double constant = 0.0;

  Condenser(int nv) {
    x_map.setZero(4, nv);
    x_off.setZero();
    hess.setZero(nv, nv);
    grad.setZero(nv);
  }

  void accumulate_cost(const Eigen::Matrix4d& w) {
    hess.noalias() += 2.0 * x_map.transpose() * w * x_map;
    grad.noalias() += 2.0 * x_map.transpose() * (w * x_off);
    constant += x_off.dot(w * x_off);
  }

  void advance(const DiscreteModel& m, int u_col, double psi) {
    x_map = (m.a * x_map).eval();
    if (u_col >= 0) x_map.col(u_col) += m.b;
    x_off = m.a * x_off + m.e * psi;
  }
};

struct RowStack {
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  int nv;

  explicit RowStack(int nv_) : nv(nv_) {}

  void add(const Eigen::VectorXd& row, double b) {
    rows.push_back(row);
    rhs.push_back(b);
  }

  // n' (X z + c) <= h   ->   (n' X) z <= h - n'c
  void add_state_rows(const Eigen::MatrixXd& normals,
                      const Eigen::VectorXd& offsets, const Condenser& c) {
    for (int i = 0; i < normals.rows(); ++i) {
      add(c.x_map.transpose() * normals.row(i).transpose(),
          offsets(i) - normals.row(i).dot(c.x_off));
    }
  }

  void add_box_rows(const Eigen::Vector4d& lo, const Eigen::Vector4d& hi,
                    const Condenser& c) {
    for (int j = 0; j < 4; ++j) {
      add(c.x_map.row(j).transpose(), hi(j) - c.x_off(j));
      add(-c.x_map.row(j).transpose(), -lo(j) + c.x_off(j));
    }
  }

  qp::QuadraticProgram finish(Eigen::MatrixXd hess, Eigen::VectorXd grad) const {
    Eigen::MatrixXd a(static_cast<int>(rows.size()), nv);
    Eigen::VectorXd b(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      a.row(static_cast<int>(i)) = rows[i].transpose();
      b(static_cast<int>(i)) = rhs[i];
    }
    return qp::QuadraticProgram(std::move(hess), std::move(grad), std::move(a),
                                std::move(b));
  }
};

struct InfeasibleSchedule : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

ConstraintSchedule::ConstraintSchedule(std::vector<geom::Polytope> steps,
                                       int start_step, geom::Polytope beyond)
    : steps_(std::move(steps)), start_(start_step), beyond_(std::move(beyond)) {}

const geom::Polytope& ConstraintSchedule::at(int k) const {
  const int i = k - start_;
  if (i < 0 || i >= count()) return beyond_;
  return steps_[i];
}

State predict_nominal(const DiscreteModel& m, const State& x_k, double u_op,
                      double psi_dot) {
  return vehicle::step_nominal(m, x_k, u_op, psi_dot);
}

bool precheck(const State& x_hat, const geom::Polytope& x_next_cons,
              const geom::Polytope& d_set) {
  const Eigen::Vector4d x = x_hat.vec();
  const Eigen::MatrixXd& n_rows = x_next_cons.facet_normals();
  const Eigen::VectorXd& offs = x_next_cons.facet_offsets();
  auto box = d_set.as_box();
  for (int i = 0; i < x_next_cons.num_facets(); ++i) {
    const Eigen::VectorXd n = n_rows.row(i).transpose();
    if (n.norm() <= geom::tol::rank) continue;
    double sup;
    if (box.has_value()) {
      const Eigen::VectorXd c = 0.5 * (box->first + box->second);
      const Eigen::VectorXd half = 0.5 * (box->second - box->first);
      sup = n.dot(c) + half.cwiseProduct(n.cwiseAbs().eval()).sum();
    } else {
      sup = d_set.support(n);
    }
    if (n.dot(x) > offs(i) - sup + kPrecheckTol) return false;
  }
  return true;
}

double backup_input(const SupervisorOutcome& prev, const State& x_k,
                    const GainSynthesis& gain) {
  if (prev.decision != Decision::safe) {
    throw std::logic_error(
        "backup_input: no stored safe supervisor solution available");
  }
  return prev.stored_u0 +
         (gain.k_gain * (x_k.vec() - prev.stored_x0)).value();
}

Architecture::Architecture(DiscreteModel m, GainSynthesis gain, TubeSets tubes,
                           ConstraintSchedule sched, CurvatureProfile curv,
                           Side side, MpcConfig cfg)
    : model_(std::move(m)),
      gain_(std::move(gain)),
      tubes_(std::move(tubes)),
      sched_(std::move(sched)),
      curv_(std::move(curv)),
      side_(side),
      cfg_(cfg) {
  a_pow_.resize(cfg_.horizon + 1);
  ab_.resize(cfg_.horizon);
  a_pow_[0].setIdentity();
  for (int i = 1; i <= cfg_.horizon; ++i) a_pow_[i] = model_.a * a_pow_[i - 1];
  for (int i = 0; i < cfg_.horizon; ++i) ab_[i] = a_pow_[i] * model_.b;
}

double Architecture::psi_at_step(int k) const {
  return vehicle::curvature_at(curv_, k * cfg_.ts * cfg_.v_x);
}

bool Architecture::tightened_bounds(int k, Eigen::Vector4d& lo,
                                    Eigen::Vector4d& hi) const {
  auto box = sched_.at(k).as_box();
  if (!box.has_value()) {
    throw std::runtime_error("schedule step is not an axis-aligned box");
  }
  lo = box->first + tubes_.z_support_neg;
  hi = box->second - tubes_.z_support_pos;
  return (hi - lo).minCoeff() >= 0.0;
}

qp::QuadraticProgram Architecture::build_supervisor_qp(const State& x_hat,
                                                       int k) const {
  const int n_h = cfg_.horizon;
  const int nv = 4 + n_h;
  Condenser c(nv);
  c.x_map.leftCols<4>().setIdentity();
  RowStack rows(nv);

  if (tubes_.u_lo_supervisor > tubes_.u_hi_supervisor) {
    throw InfeasibleSchedule("empty tightened input set");
  }

  // initial-condition tube: H_z (x_hat - x0) <= h_z
  const geom::Polytope& z = tubes_.z;
  for (int i = 0; i < z.num_facets(); ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head<4>() = -z.facet_normals().row(i).transpose();
    rows.add(row, z.facet_offsets()(i) -
                      z.facet_normals().row(i).dot(x_hat.vec()));
  }

  for (int i = 0; i < n_h; ++i) {
    // stage-i nominal state lives at absolute step k+1+i
    Eigen::Vector4d lo, hi;
    if (!tightened_bounds(k + 1 + i, lo, hi)) {
      throw InfeasibleSchedule("empty tightened state set");
    }
    rows.add_box_rows(lo, hi, c);
    c.accumulate_cost(cfg_.q_cost);
    // input stage i
    Eigen::VectorXd urow = Eigen::VectorXd::Zero(nv);
    urow(4 + i) = 1.0;
    rows.add(urow, tubes_.u_hi_supervisor);
    rows.add(-urow, -tubes_.u_lo_supervisor);
    c.advance(model_, 4 + i, psi_at_step(k + 1 + i));
  }

  const geom::Polytope& xn =
      (side_ == Side::top) ? tubes_.x_terminal_top : tubes_.x_terminal_bottom;
  rows.add_state_rows(xn.facet_normals(), xn.facet_offsets(), c);
  c.accumulate_cost(gain_.p_weight);  // terminal cost on stage N

  Eigen::MatrixXd hess = c.hess;
  for (int i = 0; i < n_h; ++i) hess(4 + i, 4 + i) += 2.0 * cfg_.r_cost;

  qp::QuadraticProgram qp = rows.finish(std::move(hess), c.grad);
  qp.objective_offset = c.constant;
  return qp;
}

qp::QuadraticProgram Architecture::build_controller_qp(const State& x_k,
                                                       int k) const {
  const int n_h = cfg_.horizon - 1;  // one step shorter than the supervisor
  const int nv = 4 + n_h;
  Condenser c(nv);
  c.x_map.leftCols<4>().setIdentity();
  RowStack rows(nv);

  if (tubes_.u_lo_controller > tubes_.u_hi_controller) {
    throw InfeasibleSchedule("empty tightened input set");
  }

  const geom::Polytope& z = tubes_.z;
  for (int i = 0; i < z.num_facets(); ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head<4>() = -z.facet_normals().row(i).transpose();
    rows.add(row, z.facet_offsets()(i) -
                      z.facet_normals().row(i).dot(x_k.vec()));
  }

  for (int i = 0; i < n_h; ++i) {
    // stage-i nominal state lives at absolute step k+i
    Eigen::Vector4d lo, hi;
    if (!tightened_bounds(k + i, lo, hi)) {
      throw InfeasibleSchedule("empty tightened state set");
    }
    rows.add_box_rows(lo, hi, c);
    c.accumulate_cost(cfg_.q_cost);
    Eigen::VectorXd urow = Eigen::VectorXd::Zero(nv);
    urow(4 + i) = 1.0;
    rows.add(urow, tubes_.u_hi_controller);
    rows.add(-urow, -tubes_.u_lo_controller);
    c.advance(model_, 4 + i, psi_at_step(k + i));
  }

  const geom::Polytope& xn =
      (side_ == Side::top) ? tubes_.x_terminal_top : tubes_.x_terminal_bottom;
  rows.add_state_rows(xn.facet_normals(), xn.facet_offsets(), c);

  c.accumulate_cost(gain_.p_weight);
  Eigen::MatrixXd hess = c.hess;
  Eigen::VectorXd grad = c.grad;
  for (int i = 0; i < n_h; ++i) hess(4 + i, 4 + i) += 2.0 * cfg_.r_cost;

  qp::QuadraticProgram qp = rows.finish(std::move(hess), std::move(grad));
  qp.objective_offset = c.constant;
  return qp;
}

SupervisorOutcome Architecture::supervise(int k, const State& x_k,
                                          double u_op) {
  SupervisorOutcome out;
  const State x_hat =
      predict_nominal(model_, x_k, u_op, psi_at_step(k));

  if (!precheck(x_hat, sched_.at(k + 1), tubes_.d_set)) {
    out.decision = Decision::detection;
    out.reason = DetectionReason::state_precheck;
    return out;
  }

  qp::QuadraticProgram prog;
  try {
    prog = build_supervisor_qp(x_hat, k);
  } catch (const InfeasibleSchedule&) {
    out.decision = Decision::detection;
    out.reason = DetectionReason::qp_infeasible;
    return out;
  }
  ++supervisor_qp_solves_;
  qp::QpOutcome sol = qp::solve(prog);
  if (sol.status == qp::QpStatus::optimal) {
    out.decision = Decision::safe;
    out.reason = DetectionReason::none;
    out.stored_x0 = sol.x_opt.head<4>();
    out.stored_u0 = sol.x_opt(4);
    out.objective = sol.objective + prog.objective_offset;
    Eigen::Vector4d xi = out.stored_x0;
    for (int i = 0; i < cfg_.horizon; ++i) {
      xi = model_.a * xi + model_.b * sol.x_opt(4 + i) +
           model_.e * psi_at_step(k + 1 + i);
    }
    out.plan_terminal = xi;
    return out;
  }
  out.decision = Decision::detection;
  out.reason = (sol.status == qp::QpStatus::infeasible)
                   ? DetectionReason::qp_infeasible
                   : DetectionReason::qp_numerical_failure;
  return out;
}

ControlResult Architecture::controller_step(int k, const State& x_k) {
  ControlResult res;
  qp::QuadraticProgram prog;
  try {
    prog = build_controller_qp(x_k, k);
  } catch (const InfeasibleSchedule&) {
    res.feasible = false;
    return res;
  }
  ++controller_qp_solves_;
  qp::QpOutcome sol = qp::solve(prog);
  if (sol.status != qp::QpStatus::optimal) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.x0_nominal = sol.x_opt.head<4>();
  res.u_nominal = sol.x_opt(4);
  res.objective = sol.objective + prog.objective_offset;
  // tube feedback law
  res.u = res.u_nominal +
          (gain_.k_gain * (x_k.vec() - res.x0_nominal)).value();
  return res;
}

StepResult Architecture::step(const State& x_k, double u_op) {
  StepResult r;
  const int k = state_.step;
  if (state_.mode == Mode::monitoring) {
    r.outcome = supervise(k, x_k, u_op);
    if (r.outcome.decision == Decision::safe) {
      r.mode_during_step = Mode::monitoring;
      r.u_applied = u_op;  // safe pass-through, bitwise
      state_.prev_outcome = r.outcome;
      state_.has_prev = true;
    } else {
      if (!state_.has_prev) {
        throw std::logic_error(
            "detection at the first step: no stored backup available");
      }
      r.mode_during_step = Mode::backup_pending;
      r.u_applied = backup_input(state_.prev_outcome, x_k, gain_);
      state_.mode = Mode::taken_over;
    }
  } else {
    r.mode_during_step = Mode::taken_over;
    r.control = controller_step(k, x_k);
    r.controller_feasible = r.control.feasible;
    r.u_applied = r.control.feasible ? r.control.u : 0.0;
  }
  ++state_.step;
  return r;
}

BaselineSca::BaselineSca(DiscreteModel m, ConstraintSchedule sched,
                         CurvatureProfile curv, MpcConfig cfg)
    : model_(std::move(m)),
      sched_(std::move(sched)),
      curv_(std::move(curv)),
      cfg_(cfg) {
  a_pow_.resize(cfg_.horizon + 1);
  ab_.resize(cfg_.horizon);
  a_pow_[0].setIdentity();
  for (int i = 1; i <= cfg_.horizon; ++i) a_pow_[i] = model_.a * a_pow_[i - 1];
  for (int i = 0; i < cfg_.horizon; ++i) ab_[i] = a_pow_[i] * model_.b;
}

double BaselineSca::psi_at_step(int k) const {
  return vehicle::curvature_at(curv_, k * cfg_.ts * cfg_.v_x);
}

Decision BaselineSca::supervise(int k, const State& x_k, double u_op) {
  const State x_hat =
      predict_nominal(model_, x_k, u_op, psi_at_step(k));
  const int n_h = cfg_.horizon;
  Condenser c(n_h);  // decision vector: inputs only
  c.x_off = x_hat.vec();
  RowStack rows(n_h);

  for (int i = 0; i < n_h; ++i) {
    // stage-i state (absolute step k+1+i); the stage-0 state x_hat itself
    // is not constrained in the nominal formulation
    if (i >= 1) {
      auto box = sched_.at(k + 1 + i).as_box();
      if (!box.has_value()) {
        throw std::runtime_error("schedule step is not an axis-aligned box");
      }
      rows.add_box_rows(box->first, box->second, c);
      c.accumulate_cost(cfg_.q_cost);
    }
    Eigen::VectorXd urow = Eigen::VectorXd::Zero(n_h);
    urow(i) = 1.0;
    rows.add(urow, cfg_.u_max);
    rows.add(-urow, cfg_.u_max);
    c.advance(model_, i, psi_at_step(k + 1 + i));
  }
  // stage-N state
  auto box = sched_.at(k + 1 + n_h).as_box();
  if (!box.has_value()) {
    throw std::runtime_error("schedule step is not an axis-aligned box");
  }
  rows.add_box_rows(box->first, box->second, c);
  c.accumulate_cost(cfg_.q_cost);

  Eigen::MatrixXd hess = c.hess;
  for (int i = 0; i < n_h; ++i) hess(i, i) += 2.0 * cfg_.r_cost;

  ++supervisor_qp_solves_;
  qp::QpOutcome sol = qp::solve(rows.finish(std::move(hess), c.grad));
  return (sol.status == qp::QpStatus::optimal) ? Decision::safe
                                               : Decision::detection;
}

ControlResult BaselineSca::controller_step(int k, const State& x_k) {
  ControlResult res;
  const int n_h = cfg_.horizon - 1;
  Condenser c(n_h);
  c.x_off = x_k.vec();
  RowStack rows(n_h);

  for (int i = 0; i < n_h; ++i) {
    if (i >= 1) {
      auto box = sched_.at(k + i).as_box();
      if (!box.has_value()) {
        throw std::runtime_error("schedule step is not an axis-aligned box");
      }
      rows.add_box_rows(box->first, box->second, c);
      c.accumulate_cost(cfg_.q_cost);
    }
    Eigen::VectorXd urow = Eigen::VectorXd::Zero(n_h);
    urow(i) = 1.0;
    rows.add(urow, cfg_.u_max);
    rows.add(-urow, cfg_.u_max);
    c.advance(model_, i, psi_at_step(k + i));
  }
  auto box = sched_.at(k + n_h).as_box();
  if (!box.has_value()) {
    throw std::runtime_error("schedule step is not an axis-aligned box");
  }
  rows.add_box_rows(box->first, box->second, c);
  c.accumulate_cost(cfg_.q_cost);

  Eigen::MatrixXd hess = c.hess;
  for (int i = 0; i < n_h; ++i) hess(i, i) += 2.0 * cfg_.r_cost;

  qp::QpOutcome sol = qp::solve(rows.finish(std::move(hess), c.grad));
  if (sol.status != qp::QpStatus::optimal) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.u_nominal = sol.x_opt(0);
  res.u = sol.x_opt(0);
  res.x0_nominal = x_k.vec();
  res.objective = sol.objective;
  return res;
}

StepResult BaselineSca::step(const State& x_k, double u_op) {
  StepResult r;
  const int k = state_.step;
  if (state_.mode == Mode::monitoring) {
    const Decision d = supervise(k, x_k, u_op);
    r.outcome.decision = d;
    if (d == Decision::safe) {
      r.mode_during_step = Mode::monitoring;
      r.u_applied = u_op;
    } else {
      // the nominal architecture has no certified backup; the takeover MPC
      // starts at the detection step itself
      r.mode_during_step = Mode::backup_pending;
      r.outcome.reason = DetectionReason::qp_infeasible;
      r.control = controller_step(k, x_k);
      r.controller_feasible = r.control.feasible;
      r.u_applied = r.control.feasible ? r.control.u : 0.0;
      state_.mode = Mode::taken_over;
    }
  } else {
    r.mode_during_step = Mode::taken_over;
    r.control = controller_step(k, x_k);
    r.controller_feasible = r.control.feasible;
    r.u_applied = r.control.feasible ? r.control.u : 0.0;
  }
  ++state_.step;
  return r;
}

}  // namespace rsca::arch
