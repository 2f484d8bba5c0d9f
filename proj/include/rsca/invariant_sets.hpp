#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "rsca/polytope.hpp"
#include "rsca/vehicle_model.hpp"

namespace rsca::invariant {

// Stabilizing feedback u = k_gain x with the Riccati solution doubling as
// the terminal cost weight. a_k = A + B k_gain has spectral radius < 1.
struct GainSynthesis {
  Eigen::MatrixXd k_gain;
  Eigen::MatrixXd p_weight;
  Eigen::MatrixXd a_k;
};

double spectral_radius(const Eigen::MatrixXd& m);

// Discrete LQR via fixed-point Riccati iteration (any dimension).
GainSynthesis dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

GainSynthesis synthesize_gain(const vehicle::DiscreteModel& m,
                              const Eigen::Matrix4d& q_lqr, double r_lqr);

struct RakovicInfo {
  int s = 0;
  double alpha = 0.0;
  int template_rows = 0;
};

// Disturbance-invariant tube cross-section satisfying
//   a_k Z (+) D (+) a_k D  subset of  Z.
// The two-step disturbance W = D (+) a_k D is summed s times per the
// outer-approximation recursion (smallest s with a_k^s W inside alpha W,
// alpha <= 0.05); the returned polytope is the smallest invariant set in a
// fixed facet template that contains that sum. Invariance is verified
// facet-by-facet before returning. `extra_dirs` rows are added to the
// template (e.g. the feedback gain direction, so K Z supports are exact).
geom::Polytope compute_Z(const Eigen::MatrixXd& a_k,
                         const geom::Polytope& d_set,
                         const Eigen::MatrixXd& extra_dirs = Eigen::MatrixXd(),
                         RakovicInfo* info = nullptr);

using SupportFn = std::function<double(const Eigen::VectorXd&)>;

SupportFn polytope_support_fn(const geom::Polytope& p);

// Maximal RPI set of x+ = a_k x + d inside `constraint_set`, computed by
// constrained pre-image iteration with redundancy removal each sweep.
// Returns a possibly-empty polytope (emptiness is a signalled outcome).
geom::Polytope maximal_rpi(const Eigen::MatrixXd& a_k,
                           const geom::Polytope& constraint_set,
                           const SupportFn& dist_support,
                           int max_sweeps = 500);

enum class Side { top, bottom };

struct SafeReference {
  Side side = Side::top;
  Eigen::Vector4d x_sr = Eigen::Vector4d::Zero();
  double epsilon = 0.5;
};

SafeReference make_safe_reference(Side side, double road_half_width,
                                  double vehicle_width, double epsilon);

// Terminal set construction in shifted coordinates: state band shifted to
// the safe reference, curvature folded into the disturbance, maximal RPI
// computed there and shifted back.
geom::Polytope compute_terminal_set(const vehicle::DiscreteModel& m,
                                    const GainSynthesis& gain,
                                    const geom::Polytope& d_set,
                                    std::pair<double, double> psi_bounds,
                                    const SafeReference& sr,
                                    const geom::Polytope& x_cons,
                                    const geom::Polytope& u_cons);

// contains_set(omega, a_k omega (+) w): evaluated through the support
// identity support(M X, d) = support(X, M'd), so no operand is materialized.
bool check_rpi(const geom::Polytope& omega, const Eigen::MatrixXd& a_k,
               const geom::Polytope& w);

// Everything the two tube MPCs tighten with, plus cached support values the
// QP assembly reads every step.
struct TubeSets {
  geom::Polytope z;
  geom::Polytope x_terminal_top;
  geom::Polytope x_terminal_bottom;
  geom::Polytope u_tight_supervisor;  // (U - KZ) - KD, 1-D
  geom::Polytope u_tight_controller;  // U - KZ, 1-D
  geom::Polytope d_set;

  Eigen::Vector4d z_support_pos = Eigen::Vector4d::Zero();  // support(Z, +e_i)
  Eigen::Vector4d z_support_neg = Eigen::Vector4d::Zero();  // support(Z, -e_i)
  Eigen::Vector4d d_support_axis = Eigen::Vector4d::Zero();
  double u_lo_supervisor = 0.0, u_hi_supervisor = 0.0;
  double u_lo_controller = 0.0, u_hi_controller = 0.0;
  Eigen::Vector4d x_sr_top = Eigen::Vector4d::Zero();
  Eigen::Vector4d x_sr_bottom = Eigen::Vector4d::Zero();
  double tier_delta = 0.0;
  std::pair<double, double> psi_bounds{0.0, 0.0};
  RakovicInfo rakovic;

  std::string to_text() const;
  static TubeSets from_text(const std::string& text);
};

// Road band and remaining state bounds shared by schedule and synthesis.
struct StateBounds {
  double de_y = 10.0;        // [m/s]
  double e_psi = 1.5707963267948966;   // [rad]
  double de_psi = 10.471975511965978;  // [rad/s], pi/(3*0.1)
};

struct SynthesisConfig {
  double road_half_width = 8.0;
  double vehicle_width = 1.8;
  double epsilon = 0.5;
  double u_max = 0.59341194567807209;  // 34*pi/180
  StateBounds bounds;
};

TubeSets synthesize_tube_sets(const vehicle::DiscreteModel& m,
                              const GainSynthesis& gain, double tier_delta,
                              std::pair<double, double> psi_bounds,
                              const SynthesisConfig& cfg);

// Cache key covering model, tier, epsilon and psi bounds.
std::string synthesis_cache_key(const vehicle::DiscreteModel& m,
                                double tier_delta,
                                std::pair<double, double> psi_bounds,
                                const SynthesisConfig& cfg);

}  // namespace rsca::invariant
