#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsca/invariant_sets.hpp"
#include "rsca/rsca.hpp"
#include "rsca/vehicle_model.hpp"

namespace rsca::sim {

enum class Tier { d1, d2, d3 };

double tier_delta(Tier t);
const char* tier_name(Tier t);

// Deterministic counter-based generator (splitmix64); identical streams on
// every platform, which the paired SCA/RSCA comparisons rely on.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
};

struct Obstacle {
  double s_start = 50.0;
  double length = 4.0;
  double width = 2.0;
  double lateral_center = 0.0;
};

struct Scenario {
  double road_half_width = 8.0;
  Obstacle obstacle;
  double v_x = 10.0;
  Tier tier = Tier::d3;
  std::uint64_t seed = 0;
  vehicle::State x0;
  int horizon = 30;
  double ts = 0.1;
  double psi_bound = 0.05;  // half-width of the curvature-rate interval
  double epsilon = 0.5;     // safe-reference band relaxation
  double obstacle_margin = 1.5;
  vehicle::VehicleParams params;  // v_x is overridden by the scenario speed
};

enum class ArchKind { rsca, sca };
enum class FailureKind { none, controller_infeasible, constraint_violation };

struct TraceRecord {
  int step = 0;
  double s = 0.0;
  vehicle::State x;
  double u_op = 0.0;
  double u_applied = 0.0;
  arch::Mode mode = arch::Mode::monitoring;
  arch::Decision decision = arch::Decision::safe;
  arch::DetectionReason reason = arch::DetectionReason::none;
  double objective = 0.0;
};

struct RunResult {
  bool success = false;
  std::optional<int> detection_step;
  double detection_distance_before_obstacle =
      std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::infinity();
  std::vector<TraceRecord> trajectory;
  FailureKind failure_kind = FailureKind::none;
  int failure_step = -1;
  // Controller MPC feasibility at the step right after a detection
  bool controller_feasible_after_detection = true;
};

double pure_pursuit(const vehicle::State& x, double v_x, double lookahead_time,
                    const vehicle::VehicleParams& params);

invariant::Side select_side(const Scenario& sc);

arch::ConstraintSchedule build_constraint_schedule(const Scenario& sc, int k0,
                                                   int count,
                                                   invariant::Side side);

struct SynthesizedSets {
  vehicle::DiscreteModel model;
  invariant::GainSynthesis gain;
  invariant::TubeSets tubes;
};

// Builds the model for the scenario speed and synthesizes gain + tube sets.
// `cache_dir`, when nonempty, loads/stores the sets keyed by the synthesis
// hash so repeated runs skip the computation.
SynthesizedSets synthesize_for(const Scenario& sc,
                               const std::string& cache_dir = "");

invariant::SynthesisConfig synthesis_config_for(const Scenario& sc);

// Uniform i.i.d. disturbance sequence on the tier box, seeded by the
// scenario; both architectures replay the identical sequence.
std::vector<Eigen::Vector4d> disturbance_sequence(const Scenario& sc,
                                                  int steps);

int max_steps(const Scenario& sc);

RunResult run_scenario(const Scenario& sc, ArchKind kind);
RunResult run_scenario(const Scenario& sc, ArchKind kind,
                       const SynthesizedSets& sets);

// Open-loop replay of the operating controller from the detection state with
// the same disturbances; returns the first step whose realized state violates
// the schedule, if any.
std::optional<int> counterfactual_violation_step(const Scenario& sc,
                                                 const RunResult& result);

struct ScenarioRow {
  int index = 0;
  Tier tier = Tier::d3;
  Scenario scenario;
  bool rsca_success = false;
  bool sca_success = false;
  std::optional<int> rsca_detection;
  std::optional<int> sca_detection;
  double rsca_min_clearance = 0.0;
  double rsca_detection_distance = 0.0;
  bool rsca_controller_feasible_after_detection = true;
  FailureKind sca_failure = FailureKind::none;
  int earlier_by = 0;  // sca detection step - rsca detection step, when both
};

struct BatchConfig {
  int n = 120;
  std::array<int, 3> tiers{40, 40, 40};
  std::uint64_t base_seed = 1;
  std::string out_dir;
  std::string cache_dir;
  int workers = 1;
  bool write_traces = false;
  // scenario sampling ranges
  double speed_lo = 5.0, speed_hi = 20.0;
  double width_lo = 0.1, width_hi = 2.5;
  double length_lo = 1.0, length_hi = 10.0;
  double obstacle_s_lo = 30.0, obstacle_s_hi = 100.0;
  double lateral_accel_max = 0.5;  // psi bound = lateral_accel_max / v_x
  int max_retries = 100;
};

struct BatchReport {
  BatchConfig config;
  std::vector<ScenarioRow> rows;
  int rsca_successes = 0;
  int sca_successes = 0;
  int earlier_interventions = 0;
  std::array<int, 3> earlier_by_tier{0, 0, 0};
  int both_detected = 0;
  int sca_never_detected = 0;
  int sca_controller_infeasible = 0;  // failure count under the
                                      // takeover-infeasibility metric

  double rsca_success_rate() const;
  double sca_success_rate() const;
  std::string summary_csv() const;
  std::string rows_csv() const;
};

BatchReport run_batch(const BatchConfig& cfg);

// Deterministic scenario for one batch slot (rejection sampling included);
// exposed so single runs can replay any batch entry exactly.
Scenario generate_batch_scenario(const BatchConfig& cfg, int index, Tier tier);

void export_trajectory_csv(const RunResult& result, const std::string& path);
std::vector<TraceRecord> parse_trajectory_csv(const std::string& path);
void export_plot_data(const Scenario& sc, const RunResult& result,
                      const std::string& path);
void export_batch(const BatchReport& report, const std::string& out_dir);

std::string trajectory_csv_string(const RunResult& result);

}  // namespace rsca::sim
