#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsca/invariant_sets.hpp"
#include "rsca/polytope.hpp"
#include "rsca/qp.hpp"
#include "rsca/vehicle_model.hpp"

namespace rsca::arch {

using invariant::GainSynthesis;
using invariant::Side;
using invariant::TubeSets;
using vehicle::CurvatureProfile;
using vehicle::DiscreteModel;
using vehicle::State;

// Per-step state constraint polytopes, indexable by absolute time step.
// Outside the stored range the no-obstacle road band extends indefinitely.
class ConstraintSchedule {
 public:
  ConstraintSchedule(std::vector<geom::Polytope> steps, int start_step,
                     geom::Polytope beyond);

  const geom::Polytope& at(int k) const;
  int start_step() const { return start_; }
  int count() const { return static_cast<int>(steps_.size()); }

 private:
  std::vector<geom::Polytope> steps_;
  int start_;
  geom::Polytope beyond_;
};

enum class Decision { safe, detection };

enum class DetectionReason {
  none,
  state_precheck,
  qp_infeasible,
  qp_numerical_failure
};

struct SupervisorOutcome {
  Decision decision = Decision::detection;
  double stored_u0 = 0.0;
  Eigen::Vector4d stored_x0 = Eigen::Vector4d::Zero();
  double objective = 0.0;
  DetectionReason reason = DetectionReason::none;
  // nominal plan endpoint (stage N), kept for reporting
  Eigen::Vector4d plan_terminal = Eigen::Vector4d::Zero();
};

enum class Mode { monitoring, backup_pending, taken_over };

struct ArchitectureState {
  Mode mode = Mode::monitoring;
  SupervisorOutcome prev_outcome;
  bool has_prev = false;
  int step = 0;
};

struct MpcConfig {
  int horizon = 30;  // N
  Eigen::Matrix4d q_cost = Eigen::Matrix4d::Identity();
  double r_cost = 0.1;
  double v_x = 10.0;  // maps step index to arc length for curvature preview
  double ts = 0.1;
  double u_max = 0.59341194567807209;
};

State predict_nominal(const DiscreteModel& m, const State& x_k, double u_op,
                      double psi_dot);

// Membership of the one-step nominal prediction in X_{k+1} tightened by the
// disturbance set; false short-circuits to detection without a QP solve.
bool precheck(const State& x_hat, const geom::Polytope& x_next_cons,
              const geom::Polytope& d_set);

double backup_input(const SupervisorOutcome& prev, const State& x_k,
                    const GainSynthesis& gain);

struct ControlResult {
  bool feasible = false;
  double u = 0.0;
  double u_nominal = 0.0;
  Eigen::Vector4d x0_nominal = Eigen::Vector4d::Zero();
  double objective = 0.0;
};

struct StepResult {
  Mode mode_during_step = Mode::monitoring;
  double u_applied = 0.0;
  SupervisorOutcome outcome;       // valid in monitoring mode
  ControlResult control;           // valid in taken_over mode
  bool controller_feasible = true;
};

// The supervisory architecture: monitoring loop, backup input at the
// detection step, tube-MPC takeover afterwards.
class Architecture {
 public:
  Architecture(DiscreteModel m, GainSynthesis gain, TubeSets tubes,
               ConstraintSchedule sched, CurvatureProfile curv, Side side,
               MpcConfig cfg);

  // full decision step (mode machine included)
  StepResult step(const State& x_k, double u_op);

  SupervisorOutcome supervise(int k, const State& x_k, double u_op);
  ControlResult controller_step(int k, const State& x_k);

  qp::QuadraticProgram build_supervisor_qp(const State& x_hat, int k) const;
  qp::QuadraticProgram build_controller_qp(const State& x_k, int k) const;

  const ArchitectureState& state() const { return state_; }
  void reset() { state_ = ArchitectureState{}; }

  int supervisor_qp_solves() const { return supervisor_qp_solves_; }
  int controller_qp_solves() const { return controller_qp_solves_; }

  const TubeSets& tubes() const { return tubes_; }
  const GainSynthesis& gain() const { return gain_; }
  const MpcConfig& config() const { return cfg_; }

 private:
  double psi_at_step(int k) const;
  // tightened box bounds for one absolute step; false if tightening empties
  bool tightened_bounds(int k, Eigen::Vector4d& lo, Eigen::Vector4d& hi) const;

  DiscreteModel model_;
  GainSynthesis gain_;
  TubeSets tubes_;
  ConstraintSchedule sched_;
  CurvatureProfile curv_;
  Side side_;
  MpcConfig cfg_;
  ArchitectureState state_;
  int supervisor_qp_solves_ = 0;
  int controller_qp_solves_ = 0;
  // powers of A and impulse responses shared by both QP builders
  std::vector<Eigen::Matrix4d> a_pow_;
  std::vector<Eigen::Vector4d> ab_;
};

// Nominal safety architecture used for the comparison study: same detection
// interface, no tightening, no terminal set, no tube.
class BaselineSca {
 public:
  BaselineSca(DiscreteModel m, ConstraintSchedule sched, CurvatureProfile curv,
              MpcConfig cfg);

  StepResult step(const State& x_k, double u_op);

  Decision supervise(int k, const State& x_k, double u_op);
  ControlResult controller_step(int k, const State& x_k);

  const ArchitectureState& state() const { return state_; }
  int supervisor_qp_solves() const { return supervisor_qp_solves_; }
  int precheck_calls() const { return 0; }  // the baseline never prechecks

 private:
  double psi_at_step(int k) const;

  DiscreteModel model_;
  ConstraintSchedule sched_;
  CurvatureProfile curv_;
  MpcConfig cfg_;
  ArchitectureState state_;
  int supervisor_qp_solves_ = 0;
  std::vector<Eigen::Matrix4d> a_pow_;
  std::vector<Eigen::Vector4d> ab_;
};

}  // namespace rsca::arch
