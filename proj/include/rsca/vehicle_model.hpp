#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rsca::vehicle {

// Vehicle data used to assemble the lateral error dynamics.
struct VehicleParams {
  double c_alpha_f = 153000.0;  // front cornering stiffness [N/rad]
  double c_alpha_r = 191000.0;  // rear cornering stiffness [N/rad]
  double l_f = 1.3;             // CoG to front axle [m]
  double l_r = 1.7;             // CoG to rear axle [m]
  double i_z = 5250.0;          // yaw inertia [kg m^2]
  double v_x = 10.0;            // longitudinal speed [m/s]
  double mass = 2500.0;         // [kg]
  double width = 1.8;           // [m]
};

// Continuous lateral error dynamics
//   x = (e_y, de_y/dt, e_psi, de_psi/dt)
//   dx/dt = a_c x + b_c delta + e_c psi_dot_des
struct ContinuousModel {
  Eigen::Matrix4d a_c;
  Eigen::Vector4d b_c;
  Eigen::Vector4d e_c;
};

// Zero-order-hold discretization x+ = A x + B u + E psi_dot_des.
struct DiscreteModel {
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
  Eigen::Vector4d e;
  double ts = 0.0;
};

struct State {
  double e_y = 0.0;    // lateral offset from road centerline [m]
  double de_y = 0.0;   // lateral velocity error [m/s]
  double e_psi = 0.0;  // heading error [rad]
  double de_psi = 0.0; // heading-rate error [rad/s]

  Eigen::Vector4d vec() const { return {e_y, de_y, e_psi, de_psi}; }
  static State from_vec(const Eigen::Vector4d& v) {
    return {v(0), v(1), v(2), v(3)};
  }
};

// Piecewise-constant road yaw-rate profile over arc length, with the
// interval bound every sample must respect.
struct CurvatureProfile {
  std::vector<std::pair<double, double>> breakpoints;  // (s [m], psi_dot [rad/s])
  double psi_lo = 0.0;
  double psi_hi = 0.0;

  static CurvatureProfile straight(double psi_lo = 0.0, double psi_hi = 0.0);
  static CurvatureProfile load_file(const std::string& path, double psi_lo,
                                    double psi_hi);
};

ContinuousModel build_continuous(const VehicleParams& p);

DiscreteModel discretize_exact(const ContinuousModel& c, double ts);

State step_nominal(const DiscreteModel& m, const State& x, double u,
                   double psi_dot);

State step_true(const DiscreteModel& m, const State& x, double u,
                double psi_dot, const Eigen::Vector4d& d);

double curvature_at(const CurvatureProfile& profile, double s);

}  // namespace rsca::vehicle
