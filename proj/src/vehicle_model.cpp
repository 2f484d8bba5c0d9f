#include "rsca/vehicle_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace rsca::vehicle {

ContinuousModel build_continuous(const VehicleParams& p) {
  if (p.v_x <= 0.0 || p.mass <= 0.0 || p.i_z <= 0.0) {
    throw std::invalid_argument(
        "build_continuous: v_x, mass and i_z must be positive");
  }
  const double cf = p.c_alpha_f;
  const double cr = p.c_alpha_r;

  const double a = -(2.0 * cf + 2.0 * cr) / (p.mass * p.v_x);
  const double b = (2.0 * cf + 2.0 * cr) / p.mass;
  const double c = (-2.0 * cf * p.l_f + 2.0 * cr * p.l_r) / (p.mass * p.v_x);
  const double d = -(2.0 * cf * p.l_f - 2.0 * cr * p.l_r) / (p.i_z * p.v_x);
  const double e = (2.0 * cf * p.l_f - 2.0 * cr * p.l_r) / p.i_z;
  const double f =
      -(2.0 * cf * p.l_f * p.l_f + 2.0 * cr * p.l_r * p.l_r) / (p.i_z * p.v_x);
  const double g = -(2.0 * cf * p.l_f - 2.0 * cr * p.l_r) / (p.mass * p.v_x) -
                   p.v_x;
  const double h = f;

  ContinuousModel m;
  m.a_c << 0, 1, 0, 0,
           0, a, b, c,
           0, 0, 0, 1,
           0, d, e, f;
  m.b_c << 0, 2.0 * cf / p.mass, 0, 2.0 * cf * p.l_f / p.i_z;
  m.e_c << 0, g, 0, h;
  return m;
}

DiscreteModel discretize_exact(const ContinuousModel& c, double ts) {
  if (ts <= 0.0) throw std::invalid_argument("discretize_exact: ts <= 0");
  // augmented system [x; u; psi_dot] with constant inputs over the sample
  Eigen::Matrix<double, 6, 6> aug = Eigen::Matrix<double, 6, 6>::Zero();
  aug.topLeftCorner<4, 4>() = c.a_c;
  aug.block<4, 1>(0, 4) = c.b_c;
  aug.block<4, 1>(0, 5) = c.e_c;
  Eigen::Matrix<double, 6, 6> phi = (aug * ts).exp();

  DiscreteModel m;
  m.a = phi.topLeftCorner<4, 4>();
  m.b = phi.block<4, 1>(0, 4);
  m.e = phi.block<4, 1>(0, 5);
  m.ts = ts;
  return m;
}

State step_nominal(const DiscreteModel& m, const State& x, double u,
                   double psi_dot) {
  return State::from_vec(m.a * x.vec() + m.b * u + m.e * psi_dot);
}

State step_true(const DiscreteModel& m, const State& x, double u,
                double psi_dot, const Eigen::Vector4d& d) {
  return State::from_vec(m.a * x.vec() + m.b * u + m.e * psi_dot + d);
}

CurvatureProfile CurvatureProfile::straight(double psi_lo, double psi_hi) {
  CurvatureProfile p;
  p.breakpoints = {{0.0, 0.0}};
  p.psi_lo = psi_lo;
  p.psi_hi = psi_hi;
  return p;
}

CurvatureProfile CurvatureProfile::load_file(const std::string& path,
                                             double psi_lo, double psi_hi) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("curvature profile: cannot open " + path);
  CurvatureProfile p;
  p.psi_lo = psi_lo;
  p.psi_hi = psi_hi;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    double s = 0.0, v = 0.0;
    if (!(ls >> s >> v)) continue;
    if (v < psi_lo - 1e-12 || v > psi_hi + 1e-12) {
      throw std::runtime_error("curvature profile: sample outside bounds");
    }
    if (!p.breakpoints.empty() && s <= p.breakpoints.back().first) {
      throw std::runtime_error("curvature profile: breakpoints not increasing");
    }
    p.breakpoints.emplace_back(s, v);
  }
  if (p.breakpoints.empty()) {
    throw std::runtime_error("curvature profile: no samples in " + path);
  }
  return p;
}

double curvature_at(const CurvatureProfile& profile, double s) {
  if (profile.breakpoints.empty()) return 0.0;
  double value = profile.breakpoints.front().second;
  for (const auto& [bs, bv] : profile.breakpoints) {
    if (bs <= s) value = bv;
    else break;
  }
  return value;
}

}  // namespace rsca::vehicle
