#include "rsca/scenario_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace rsca::sim {

namespace fs = std::filesystem;

double tier_delta(Tier t) {
  switch (t) {
    case Tier::d1: return 1e-2;
    case Tier::d2: return 1e-3;
    case Tier::d3: return 1e-4;
  }
  return 0.0;
}

const char* tier_name(Tier t) {
  switch (t) {
    case Tier::d1: return "d1";
    case Tier::d2: return "d2";
    case Tier::d3: return "d3";
  }
  return "?";
}

std::uint64_t Rng::next() {
  state += 0x9E3779B97f4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* mode_name(arch::Mode m) {
  switch (m) {
    case arch::Mode::monitoring: return "monitoring";
    case arch::Mode::backup_pending: return "backup_pending";
    case arch::Mode::taken_over: return "taken_over";
  }
  return "?";
}

arch::Mode mode_from(const std::string& s) {
  if (s == "monitoring") return arch::Mode::monitoring;
  if (s == "backup_pending") return arch::Mode::backup_pending;
  if (s == "taken_over") return arch::Mode::taken_over;
  throw std::runtime_error("unknown mode: " + s);
}

const char* decision_name(arch::Decision d) {
  return d == arch::Decision::safe ? "safe" : "detection";
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b * 0x9E3779B97f4A7C15ull));
  return r.next();
}

}  // namespace

double pure_pursuit(const vehicle::State& x, double v_x, double lookahead_time,
                    const vehicle::VehicleParams& params) {
  const double l_d = v_x * lookahead_time;
  if (l_d <= 0.0) throw std::invalid_argument("pure_pursuit: lookahead <= 0");
  // goal point on the reference (centerline) l_d ahead in the road frame
  const double alpha = std::atan2(-x.e_y, l_d) - x.e_psi;
  const double wheelbase = params.l_f + params.l_r;
  double delta = std::atan(2.0 * wheelbase * std::sin(alpha) / l_d);
  const double u_max = 34.0 * M_PI / 180.0;
  return std::clamp(delta, -u_max, u_max);
}

invariant::Side select_side(const Scenario& sc) {
  const Obstacle& o = sc.obstacle;
  const double gap_top =
      sc.road_half_width - (o.lateral_center + 0.5 * o.width);
  const double gap_bottom =
      (o.lateral_center - 0.5 * o.width) + sc.road_half_width;
  return (gap_top >= gap_bottom) ? invariant::Side::top
                                 : invariant::Side::bottom;
}

arch::ConstraintSchedule build_constraint_schedule(const Scenario& sc, int k0,
                                                   int count,
                                                   invariant::Side side) {
  const double band = sc.road_half_width - 0.5 * sc.params.width;
  const double de_psi_max = M_PI / (3.0 * sc.ts);
  Eigen::Vector4d lo_full(-band, -10.0, -M_PI / 2.0, -de_psi_max);
  Eigen::Vector4d hi_full(band, 10.0, M_PI / 2.0, de_psi_max);
  geom::Polytope road_band = geom::Polytope::box(lo_full, hi_full);

  const Obstacle& o = sc.obstacle;
  const double s_lo = o.s_start - sc.obstacle_margin;
  const double s_hi = o.s_start + o.length + sc.obstacle_margin;

  std::vector<geom::Polytope> steps;
  steps.reserve(count);
  for (int k = k0; k < k0 + count; ++k) {
    const double s = k * sc.ts * sc.v_x;
    if (s >= s_lo && s <= s_hi) {
      Eigen::Vector4d lo = lo_full, hi = hi_full;
      if (side == invariant::Side::top) {
        lo(0) = o.lateral_center + 0.5 * o.width + 0.5 * sc.params.width;
      } else {
        hi(0) = o.lateral_center - 0.5 * o.width - 0.5 * sc.params.width;
      }
      if (lo(0) > hi(0)) {
        throw std::runtime_error(
            "build_constraint_schedule: obstacle band empty (not passable)");
      }
      steps.push_back(geom::Polytope::box(lo, hi));
    } else {
      steps.push_back(road_band);
    }
  }
  return arch::ConstraintSchedule(std::move(steps), k0, road_band);
}

invariant::SynthesisConfig synthesis_config_for(const Scenario& sc) {
  invariant::SynthesisConfig cfg;
  cfg.road_half_width = sc.road_half_width;
  cfg.vehicle_width = sc.params.width;
  cfg.epsilon = sc.epsilon;
  cfg.u_max = 34.0 * M_PI / 180.0;
  cfg.bounds.de_y = 10.0;
  cfg.bounds.e_psi = M_PI / 2.0;
  cfg.bounds.de_psi = M_PI / (3.0 * sc.ts);
  return cfg;
}

SynthesizedSets synthesize_for(const Scenario& sc,
                               const std::string& cache_dir) {
  vehicle::VehicleParams p = sc.params;
  p.v_x = sc.v_x;
  vehicle::DiscreteModel dm =
      vehicle::discretize_exact(vehicle::build_continuous(p), sc.ts);
  invariant::GainSynthesis gain =
      invariant::synthesize_gain(dm, Eigen::Matrix4d::Identity(), 0.1);
  invariant::SynthesisConfig cfg = synthesis_config_for(sc);
  const double delta = tier_delta(sc.tier);
  const std::pair<double, double> psi{-sc.psi_bound, sc.psi_bound};

  if (!cache_dir.empty()) {
    const std::string key = invariant::synthesis_cache_key(dm, delta, psi, cfg);
    const fs::path file = fs::path(cache_dir) / ("sets_" + key + ".txt");
    if (fs::exists(file)) {
      std::ifstream in(file);
      std::stringstream ss;
      ss << in.rdbuf();
      return {dm, gain, invariant::TubeSets::from_text(ss.str())};
    }
    invariant::TubeSets tubes =
        invariant::synthesize_tube_sets(dm, gain, delta, psi, cfg);
    fs::create_directories(cache_dir);
    std::ofstream out(file);
    out << tubes.to_text();
    return {dm, gain, tubes};
  }
  return {dm, gain, invariant::synthesize_tube_sets(dm, gain, delta, psi, cfg)};
}

std::vector<Eigen::Vector4d> disturbance_sequence(const Scenario& sc,
                                                  int steps) {
  Rng rng(mix_seed(sc.seed, 0xD157u));
  const double d = tier_delta(sc.tier);
  std::vector<Eigen::Vector4d> seq(steps);
  for (int k = 0; k < steps; ++k) {
    for (int j = 0; j < 4; ++j) {
      seq[k](j) = d * (2.0 * rng.uniform() - 1.0);
    }
  }
  return seq;
}

int max_steps(const Scenario& sc) {
  const double s_end = sc.obstacle.s_start + sc.obstacle.length +
                       2.0 * sc.horizon * sc.ts * sc.v_x;
  return static_cast<int>(std::ceil(s_end / (sc.ts * sc.v_x))) + 2;
}

RunResult run_scenario(const Scenario& sc, ArchKind kind) {
  return run_scenario(sc, kind, synthesize_for(sc));
}

RunResult run_scenario(const Scenario& sc, ArchKind kind,
                       const SynthesizedSets& sets) {
  const int steps = max_steps(sc);
  const invariant::Side side = select_side(sc);
  arch::ConstraintSchedule sched =
      build_constraint_schedule(sc, 0, steps + sc.horizon + 2, side);
  vehicle::CurvatureProfile curv =
      vehicle::CurvatureProfile::straight(-sc.psi_bound, sc.psi_bound);

  arch::MpcConfig mpc;
  mpc.horizon = sc.horizon;
  mpc.v_x = sc.v_x;
  mpc.ts = sc.ts;

  std::optional<arch::Architecture> rsca;
  std::optional<arch::BaselineSca> sca;
  if (kind == ArchKind::rsca) {
    rsca.emplace(sets.model, sets.gain, sets.tubes, sched, curv, side, mpc);
  } else {
    sca.emplace(sets.model, sched, curv, mpc);
  }

  const std::vector<Eigen::Vector4d> dists = disturbance_sequence(sc, steps);
  RunResult res;
  res.trajectory.reserve(steps);

  vehicle::State x = sc.x0;
  bool failed = false;
  for (int k = 0; k < steps; ++k) {
    const double s_k = k * sc.ts * sc.v_x;
    const double u_op = pure_pursuit(x, sc.v_x, 0.5, sc.params);
    arch::StepResult sr = (kind == ArchKind::rsca) ? rsca->step(x, u_op)
                                                   : sca->step(x, u_op);

    TraceRecord rec;
    rec.step = k;
    rec.s = s_k;
    rec.x = x;
    rec.u_op = u_op;
    rec.u_applied = sr.u_applied;
    rec.mode = sr.mode_during_step;
    rec.decision = (sr.mode_during_step == arch::Mode::monitoring)
                       ? arch::Decision::safe
                       : arch::Decision::detection;
    rec.reason = sr.outcome.reason;
    rec.objective = (sr.mode_during_step == arch::Mode::taken_over)
                        ? sr.control.objective
                        : sr.outcome.objective;
    res.trajectory.push_back(rec);

    if (sr.mode_during_step == arch::Mode::backup_pending &&
        !res.detection_step.has_value()) {
      res.detection_step = k;
      res.detection_distance_before_obstacle = sc.obstacle.s_start - s_k;
    }
    if (res.detection_step.has_value() && k == *res.detection_step + 1 &&
        sr.mode_during_step == arch::Mode::taken_over) {
      res.controller_feasible_after_detection = sr.controller_feasible;
    }
    if (!sr.controller_feasible) {
      res.failure_kind = FailureKind::controller_infeasible;
      res.failure_step = k;
      failed = true;
      break;
    }

    // clearance bookkeeping at the current position
    const double road_clear =
        (sc.road_half_width - 0.5 * sc.params.width) - std::abs(x.e_y);
    res.min_clearance = std::min(res.min_clearance, road_clear);
    if (s_k >= sc.obstacle.s_start &&
        s_k <= sc.obstacle.s_start + sc.obstacle.length) {
      const double obs_clear =
          (side == invariant::Side::top)
              ? (x.e_y - 0.5 * sc.params.width) -
                    (sc.obstacle.lateral_center + 0.5 * sc.obstacle.width)
              : (sc.obstacle.lateral_center - 0.5 * sc.obstacle.width) -
                    (x.e_y + 0.5 * sc.params.width);
      res.min_clearance = std::min(res.min_clearance, obs_clear);
    }

    const vehicle::State x_next = vehicle::step_true(
        sets.model, x, sr.u_applied,
        vehicle::curvature_at(curv, s_k), dists[k]);
    if (!sched.at(k + 1).contains_point(x_next.vec(), 1e-9)) {
      res.failure_kind = FailureKind::constraint_violation;
      res.failure_step = k + 1;
      failed = true;
      x = x_next;
      break;
    }
    x = x_next;
    if ((k + 1) * sc.ts * sc.v_x >
        sc.obstacle.s_start + sc.obstacle.length +
            2.0 * sc.horizon * sc.ts * sc.v_x) {
      break;
    }
  }

  res.success = !failed && res.controller_feasible_after_detection;
  return res;
}

std::optional<int> counterfactual_violation_step(const Scenario& sc,
                                                 const RunResult& result) {
  if (!result.detection_step.has_value()) return std::nullopt;
  const int k0 = *result.detection_step;
  const SynthesizedSets sets = synthesize_for(sc);
  const int steps = max_steps(sc);
  const invariant::Side side = select_side(sc);
  arch::ConstraintSchedule sched =
      build_constraint_schedule(sc, 0, steps + sc.horizon + 2, side);
  vehicle::CurvatureProfile curv =
      vehicle::CurvatureProfile::straight(-sc.psi_bound, sc.psi_bound);
  const std::vector<Eigen::Vector4d> dists = disturbance_sequence(sc, steps);

  vehicle::State x = result.trajectory[k0].x;
  for (int k = k0; k < steps; ++k) {
    const double s_k = k * sc.ts * sc.v_x;
    const double u_op = pure_pursuit(x, sc.v_x, 0.5, sc.params);
    x = vehicle::step_true(sets.model, x, u_op,
                           vehicle::curvature_at(curv, s_k), dists[k]);
    if (!sched.at(k + 1).contains_point(x.vec(), 1e-9)) return k + 1;
  }
  return std::nullopt;
}

namespace {

struct SetsCache {
  std::mutex mu;
  std::unordered_map<std::string, SynthesizedSets> map;

  SynthesizedSets get(const Scenario& sc, const std::string& cache_dir) {
    vehicle::VehicleParams p = sc.params;
    p.v_x = sc.v_x;
    vehicle::DiscreteModel dm =
        vehicle::discretize_exact(vehicle::build_continuous(p), sc.ts);
    const std::string key = invariant::synthesis_cache_key(
        dm, tier_delta(sc.tier), {-sc.psi_bound, sc.psi_bound},
        synthesis_config_for(sc));
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = map.find(key);
      if (it != map.end()) return it->second;
    }
    SynthesizedSets sets = synthesize_for(sc, cache_dir);
    std::lock_guard<std::mutex> lock(mu);
    return map.emplace(key, std::move(sets)).first->second;
  }
};

Scenario generate_scenario(const BatchConfig& cfg, int index, Tier tier,
                           SetsCache& cache) {
  Rng rng(mix_seed(cfg.base_seed, 0xA11CE + static_cast<std::uint64_t>(index)));
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Scenario sc;
    sc.tier = tier;
    sc.v_x = rng.uniform(cfg.speed_lo, cfg.speed_hi);
    sc.obstacle.width = rng.uniform(cfg.width_lo, cfg.width_hi);
    sc.obstacle.length = rng.uniform(cfg.length_lo, cfg.length_hi);
    sc.obstacle.s_start = rng.uniform(cfg.obstacle_s_lo, cfg.obstacle_s_hi);
    sc.obstacle.lateral_center = 0.0;
    sc.psi_bound = cfg.lateral_accel_max / sc.v_x;
    sc.seed = rng.next();
    const double e_y_max = sc.road_half_width - 0.5 * sc.params.width - 1.0;
    sc.x0.e_y = rng.uniform(-e_y_max, e_y_max);
    sc.x0.de_y = rng.uniform(-0.2, 0.2);
    sc.x0.e_psi = rng.uniform(-0.1, 0.1);
    sc.x0.de_psi = rng.uniform(-0.1, 0.1);

    // passability of the chosen side
    const invariant::Side side = select_side(sc);
    const double band = sc.road_half_width - 0.5 * sc.params.width;
    const double inner =
        (side == invariant::Side::top)
            ? sc.obstacle.lateral_center + 0.5 * sc.obstacle.width +
                  0.5 * sc.params.width
            : -(sc.obstacle.lateral_center - 0.5 * sc.obstacle.width -
                0.5 * sc.params.width);
    if (inner > band) continue;

    SynthesizedSets sets;
    try {
      sets = cache.get(sc, cfg.cache_dir);
    } catch (const std::exception&) {
      continue;  // synthesis infeasible for this draw
    }

    // both supervisors must be feasible at k = 0
    const int steps = max_steps(sc);
    arch::ConstraintSchedule sched =
        build_constraint_schedule(sc, 0, steps + sc.horizon + 2, side);
    vehicle::CurvatureProfile curv =
        vehicle::CurvatureProfile::straight(-sc.psi_bound, sc.psi_bound);
    arch::MpcConfig mpc;
    mpc.horizon = sc.horizon;
    mpc.v_x = sc.v_x;
    mpc.ts = sc.ts;
    const double u_op = pure_pursuit(sc.x0, sc.v_x, 0.5, sc.params);
    arch::Architecture rsca(sets.model, sets.gain, sets.tubes, sched, curv,
                            side, mpc);
    if (rsca.supervise(0, sc.x0, u_op).decision != arch::Decision::safe) {
      continue;
    }
    arch::BaselineSca sca(sets.model, sched, curv, mpc);
    if (sca.supervise(0, sc.x0, u_op) != arch::Decision::safe) continue;
    return sc;
  }
  throw std::runtime_error("generate_scenario: retries exhausted for slot " +
                           std::to_string(index));
}

}  // namespace

Scenario generate_batch_scenario(const BatchConfig& cfg, int index,
                                 Tier tier) {
  SetsCache cache;
  return generate_scenario(cfg, index, tier, cache);
}

double BatchReport::rsca_success_rate() const {
  return rows.empty() ? 0.0
                      : static_cast<double>(rsca_successes) / rows.size();
}

double BatchReport::sca_success_rate() const {
  return rows.empty() ? 0.0 : static_cast<double>(sca_successes) / rows.size();
}

BatchReport run_batch(const BatchConfig& cfg) {
  if (cfg.tiers[0] + cfg.tiers[1] + cfg.tiers[2] != cfg.n) {
    throw std::invalid_argument("run_batch: tier split must sum to n");
  }
  BatchReport report;
  report.config = cfg;
  report.rows.resize(cfg.n);

  SetsCache cache;
  std::atomic<int> next{0};
  std::vector<std::string> errors(cfg.n);

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.n) return;
      Tier tier = Tier::d3;
      if (i < cfg.tiers[0]) tier = Tier::d1;
      else if (i < cfg.tiers[0] + cfg.tiers[1]) tier = Tier::d2;
      try {
        ScenarioRow row;
        row.index = i;
        row.tier = tier;
        row.scenario = generate_scenario(cfg, i, tier, cache);
        SynthesizedSets sets = cache.get(row.scenario, cfg.cache_dir);
        RunResult rr = run_scenario(row.scenario, ArchKind::rsca, sets);
        RunResult sr = run_scenario(row.scenario, ArchKind::sca, sets);
        row.rsca_success = rr.success;
        row.sca_success = sr.success;
        row.rsca_detection = rr.detection_step;
        row.sca_detection = sr.detection_step;
        row.rsca_min_clearance = rr.min_clearance;
        row.rsca_detection_distance = rr.detection_distance_before_obstacle;
        row.rsca_controller_feasible_after_detection =
            rr.controller_feasible_after_detection;
        row.sca_failure = sr.failure_kind;
        if (rr.detection_step && sr.detection_step) {
          row.earlier_by = *sr.detection_step - *rr.detection_step;
        }
        if (cfg.write_traces && !cfg.out_dir.empty()) {
          fs::create_directories(cfg.out_dir);
          export_trajectory_csv(
              rr, (fs::path(cfg.out_dir) /
                   ("trace_rsca_" + std::to_string(i) + ".csv")).string());
          export_trajectory_csv(
              sr, (fs::path(cfg.out_dir) /
                   ("trace_sca_" + std::to_string(i) + ".csv")).string());
        }
        report.rows[i] = std::move(row);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < cfg.n; ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("run_batch: slot " + std::to_string(i) +
                               " failed: " + errors[i]);
    }
  }

  for (const ScenarioRow& row : report.rows) {
    report.rsca_successes += row.rsca_success ? 1 : 0;
    report.sca_successes += row.sca_success ? 1 : 0;
    if (row.rsca_detection && row.sca_detection) {
      ++report.both_detected;
      if (row.earlier_by >= 1) {
        ++report.earlier_interventions;
        ++report.earlier_by_tier[static_cast<int>(row.tier)];
      }
    }
    if (row.rsca_detection && !row.sca_detection) ++report.sca_never_detected;
    if (row.sca_failure == FailureKind::controller_infeasible) {
      ++report.sca_controller_infeasible;
    }
  }

  if (!cfg.out_dir.empty()) export_batch(report, cfg.out_dir);
  return report;
}

std::string trajectory_csv_string(const RunResult& result) {
  std::ostringstream os;
  os << "step,s,e_y,de_y,e_psi,de_psi,u_op,u_applied,mode,decision\n";
  for (const TraceRecord& r : result.trajectory) {
    os << r.step << "," << fmt_double(r.s) << "," << fmt_double(r.x.e_y) << ","
       << fmt_double(r.x.de_y) << "," << fmt_double(r.x.e_psi) << ","
       << fmt_double(r.x.de_psi) << "," << fmt_double(r.u_op) << ","
       << fmt_double(r.u_applied) << "," << mode_name(r.mode) << ","
       << decision_name(r.decision) << "\n";
  }
  return os.str();
}

void export_trajectory_csv(const RunResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << trajectory_csv_string(result);
}

std::vector<TraceRecord> parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trajectory file " + path);
  }
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    TraceRecord r;
    std::getline(ls, field, ','); r.step = std::stoi(field);
    std::getline(ls, field, ','); r.s = std::stod(field);
    std::getline(ls, field, ','); r.x.e_y = std::stod(field);
    std::getline(ls, field, ','); r.x.de_y = std::stod(field);
    std::getline(ls, field, ','); r.x.e_psi = std::stod(field);
    std::getline(ls, field, ','); r.x.de_psi = std::stod(field);
    std::getline(ls, field, ','); r.u_op = std::stod(field);
    std::getline(ls, field, ','); r.u_applied = std::stod(field);
    std::getline(ls, field, ','); r.mode = mode_from(field);
    std::getline(ls, field, ',');
    r.decision = (field == "safe") ? arch::Decision::safe
                                   : arch::Decision::detection;
    out.push_back(r);
  }
  return out;
}

void export_plot_data(const Scenario& sc, const RunResult& result,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# trajectory: s e_y\n";
  for (const TraceRecord& r : result.trajectory) {
    out << fmt_double(r.s) << " " << fmt_double(r.x.e_y) << "\n";
  }
  const Obstacle& o = sc.obstacle;
  const double y0 = o.lateral_center - 0.5 * o.width;
  const double y1 = o.lateral_center + 0.5 * o.width;
  out << "\n# obstacle rectangle: s e_y (closed polygon)\n";
  out << fmt_double(o.s_start) << " " << fmt_double(y0) << "\n"
      << fmt_double(o.s_start + o.length) << " " << fmt_double(y0) << "\n"
      << fmt_double(o.s_start + o.length) << " " << fmt_double(y1) << "\n"
      << fmt_double(o.s_start) << " " << fmt_double(y1) << "\n"
      << fmt_double(o.s_start) << " " << fmt_double(y0) << "\n";
  const double s_end =
      result.trajectory.empty() ? 0.0 : result.trajectory.back().s;
  const double band = sc.road_half_width - 0.5 * sc.params.width;
  const double sr = band - 0.5 * sc.epsilon;
  out << "\n# road boundaries: s e_y\n";
  out << "0 " << fmt_double(sc.road_half_width) << "\n"
      << fmt_double(s_end) << " " << fmt_double(sc.road_half_width) << "\n\n";
  out << "0 " << fmt_double(-sc.road_half_width) << "\n"
      << fmt_double(s_end) << " " << fmt_double(-sc.road_half_width) << "\n";
  out << "\n# safe references: s e_y\n";
  out << "0 " << fmt_double(sr) << "\n"
      << fmt_double(s_end) << " " << fmt_double(sr) << "\n\n";
  out << "0 " << fmt_double(-sr) << "\n"
      << fmt_double(s_end) << " " << fmt_double(-sr) << "\n";
}

std::string BatchReport::rows_csv() const {
  std::ostringstream os;
  os << "index,tier,seed,v_x,obs_s,obs_len,obs_width,psi_bound,x0_ey,"
        "rsca_success,sca_success,rsca_detection,sca_detection,earlier_by,"
        "rsca_det_distance,rsca_min_clearance,rsca_ctrl_feasible_next,"
        "sca_failure\n";
  for (const ScenarioRow& r : rows) {
    os << r.index << "," << tier_name(r.tier) << "," << r.scenario.seed << ","
       << fmt_double(r.scenario.v_x) << ","
       << fmt_double(r.scenario.obstacle.s_start) << ","
       << fmt_double(r.scenario.obstacle.length) << ","
       << fmt_double(r.scenario.obstacle.width) << ","
       << fmt_double(r.scenario.psi_bound) << ","
       << fmt_double(r.scenario.x0.e_y) << ","
       << (r.rsca_success ? 1 : 0) << "," << (r.sca_success ? 1 : 0) << ","
       << (r.rsca_detection ? std::to_string(*r.rsca_detection) : "-") << ","
       << (r.sca_detection ? std::to_string(*r.sca_detection) : "-") << ","
       << r.earlier_by << "," << fmt_double(r.rsca_detection_distance) << ","
       << fmt_double(r.rsca_min_clearance) << ","
       << (r.rsca_controller_feasible_after_detection ? 1 : 0) << ","
       << (r.sca_failure == FailureKind::none
               ? "none"
               : (r.sca_failure == FailureKind::controller_infeasible
                      ? "controller_infeasible"
                      : "constraint_violation"))
       << "\n";
  }
  return os.str();
}

std::string BatchReport::summary_csv() const {
  std::ostringstream os;
  os << "metric,value\n";
  os << "n," << rows.size() << "\n";
  os << "base_seed," << config.base_seed << "\n";
  os << "tiers," << config.tiers[0] << "/" << config.tiers[1] << "/"
     << config.tiers[2] << "\n";
  os << "lateral_accel_max," << fmt_double(config.lateral_accel_max) << "\n";
  os << "rsca_successes," << rsca_successes << "\n";
  os << "sca_successes," << sca_successes << "\n";
  os << "rsca_success_rate," << fmt_double(rsca_success_rate()) << "\n";
  os << "sca_success_rate," << fmt_double(sca_success_rate()) << "\n";
  os << "both_detected," << both_detected << "\n";
  os << "sca_never_detected," << sca_never_detected << "\n";
  os << "sca_controller_infeasible," << sca_controller_infeasible << "\n";
  os << "earlier_interventions," << earlier_interventions << "\n";
  os << "earlier_d1," << earlier_by_tier[0] << "\n";
  os << "earlier_d2," << earlier_by_tier[1] << "\n";
  os << "earlier_d3," << earlier_by_tier[2] << "\n";
  return os.str();
}

void export_batch(const BatchReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv");
    out << report.summary_csv();
  }
  {
    std::ofstream out(fs::path(out_dir) / "scenarios.csv");
    if (!out) throw std::runtime_error("cannot write scenarios.csv");
    out << report.rows_csv();
  }
}

}  // namespace rsca::sim
