#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rsca/invariant_sets.hpp"
#include "rsca/scenario_sim.hpp"

namespace fs = std::filesystem;
using namespace rsca;

namespace {

sim::Tier tier_from_string(const std::string& s) {
  if (s == "d1") return sim::Tier::d1;
  if (s == "d2") return sim::Tier::d2;
  if (s == "d3") return sim::Tier::d3;
  throw CLI::ValidationError("--tier", "expected d1, d2 or d3");
}

int cmd_simulate(const std::string& tier, double speed, double obs_width,
                 double obs_length, double obs_pos, std::uint64_t seed,
                 const std::string& arch, const std::string& out_dir,
                 double psi_bound, double ey0) {
  sim::Scenario sc;
  sc.tier = tier_from_string(tier);
  sc.v_x = speed;
  sc.obstacle.width = obs_width;
  sc.obstacle.length = obs_length;
  sc.obstacle.s_start = obs_pos;
  sc.seed = seed;
  sc.psi_bound = (psi_bound > 0) ? psi_bound : 0.5 / sc.v_x;
  sc.x0.e_y = ey0;

  const sim::ArchKind kind =
      (arch == "sca") ? sim::ArchKind::sca : sim::ArchKind::rsca;
  sim::RunResult res = sim::run_scenario(sc, kind);

  std::cout << "architecture: " << arch << "\n"
            << "steps: " << res.trajectory.size() << "\n"
            << "success: " << (res.success ? "yes" : "no") << "\n";
  if (res.detection_step) {
    std::cout << "detection_step: " << *res.detection_step << "\n"
              << "detection_distance_before_obstacle: "
              << res.detection_distance_before_obstacle << " m\n";
  } else {
    std::cout << "detection_step: none\n";
  }
  std::cout << "min_clearance: " << res.min_clearance << " m\n";
  if (res.failure_kind != sim::FailureKind::none) {
    std::cout << "failure: "
              << (res.failure_kind == sim::FailureKind::controller_infeasible
                      ? "controller_infeasible"
                      : "constraint_violation")
              << " at step " << res.failure_step << "\n";
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    sim::export_trajectory_csv(res,
                               (fs::path(out_dir) / "trajectory.csv").string());
    sim::export_plot_data(sc, res, (fs::path(out_dir) / "plot.txt").string());
    std::cout << "outputs written to " << out_dir << "\n";
  }
  return res.success ? 0 : 1;
}

int cmd_batch(int n, const std::vector<int>& tiers, std::uint64_t seed,
              const std::string& out_dir, int workers,
              const std::string& cache_dir, bool traces) {
  sim::BatchConfig cfg;
  cfg.n = n;
  if (tiers.size() == 3) cfg.tiers = {tiers[0], tiers[1], tiers[2]};
  cfg.base_seed = seed;
  cfg.out_dir = out_dir;
  cfg.workers = workers;
  cfg.cache_dir = cache_dir;
  cfg.write_traces = traces;

  sim::BatchReport report = sim::run_batch(cfg);
  std::cout << report.summary_csv();
  return (report.rsca_successes == n) ? 0 : 1;
}

int cmd_synthesize(const std::string& tier, double speed, double epsilon,
                   double psi_bound, const std::string& cache_file) {
  sim::Scenario sc;
  sc.tier = tier_from_string(tier);
  sc.v_x = speed;
  sc.epsilon = epsilon;
  sc.psi_bound = (psi_bound > 0) ? psi_bound : 0.5 / sc.v_x;

  sim::SynthesizedSets sets = sim::synthesize_for(sc);
  const auto& t = sets.tubes;
  std::cout << "tier: " << tier << "  speed: " << speed
            << "  epsilon: " << epsilon << "  psi: [" << -sc.psi_bound << ", "
            << sc.psi_bound << "]\n";
  std::cout << "gain K: " << sets.gain.k_gain << "\n";
  std::cout << "rakovic s: " << t.rakovic.s << "  alpha: " << t.rakovic.alpha
            << "\n";
  std::cout << "Z facets: " << t.z.num_facets() << "  e_y support: "
            << t.z_support_pos(0) << "\n";
  std::cout << "terminal top facets: " << t.x_terminal_top.num_facets()
            << "  bottom: " << t.x_terminal_bottom.num_facets() << "\n";
  std::cout << "supervisor input bounds: [" << t.u_lo_supervisor << ", "
            << t.u_hi_supervisor << "]\n";
  if (!cache_file.empty()) {
    std::ofstream out(cache_file);
    if (!out) {
      std::cerr << "cannot write " << cache_file << "\n";
      return 1;
    }
    out << t.to_text();
    std::cout << "sets written to " << cache_file << "\n";
  }
  return 0;
}

int cmd_verify_sets(double speed, double epsilon, double psi_bound) {
  int failures = 0;
  for (const char* tier : {"d1", "d2", "d3"}) {
    sim::Scenario sc;
    sc.tier = tier_from_string(tier);
    sc.v_x = speed;
    sc.epsilon = epsilon;
    sc.psi_bound = (psi_bound > 0) ? psi_bound : 0.5 / sc.v_x;
    sim::SynthesizedSets sets = sim::synthesize_for(sc);
    const auto& t = sets.tubes;
    const Eigen::MatrixXd& ak = sets.gain.a_k;

    // tube condition: a_k Z (+) D (+) a_k D inside Z, per facet
    double worst = -1e18;
    for (int i = 0; i < t.z.num_facets(); ++i) {
      const Eigen::VectorXd n = t.z.facet_normals().row(i).transpose();
      const Eigen::VectorXd v = ak.transpose() * n;
      double lhs = t.d_set.support(n);
      if (v.norm() > geom::tol::rank) {
        lhs += t.z.support(v) + t.d_set.support(v);
      }
      worst = std::max(worst, lhs - t.z.facet_offsets()(i));
    }
    const bool tube_ok = worst <= geom::tol::feasibility;
    std::cout << (tube_ok ? "[PASS] " : "[FAIL] ") << tier
              << " tube condition, max facet slack " << worst << "\n";
    failures += tube_ok ? 0 : 1;

    // terminal sets against the augmented disturbance
    geom::Polytope psi_int =
        geom::Polytope::interval(-sc.psi_bound, sc.psi_bound);
    geom::Polytope e_psi = geom::linear_map(sets.model.e, psi_int);
    for (invariant::Side side : {invariant::Side::top,
                                 invariant::Side::bottom}) {
      const bool top = side == invariant::Side::top;
      const Eigen::Vector4d xsr = top ? t.x_sr_top : t.x_sr_bottom;
      const Eigen::Vector4d shift =
          (sets.model.a - Eigen::Matrix4d::Identity()) * xsr;
      geom::Polytope dtilde =
          geom::minkowski_sum(t.d_set, e_psi).translated(shift);
      geom::Polytope omega =
          (top ? t.x_terminal_top : t.x_terminal_bottom).translated(-xsr);
      const bool rpi_ok = invariant::check_rpi(omega, ak, dtilde);
      std::cout << (rpi_ok ? "[PASS] " : "[FAIL] ") << tier << " terminal set "
                << (top ? "top" : "bottom") << " robust invariance\n";
      failures += rpi_ok ? 0 : 1;
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust safe-control simulation toolkit"};
  app.set_config("--config", "", "config file with key=value options");
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a single scenario");
  std::string tier = "d3", arch = "rsca", out_dir;
  double speed = 12.0, obs_w = 2.0, obs_l = 4.0, obs_p = 50.0;
  double psi_bound = -1.0, ey0 = 0.0;
  std::uint64_t seed = 7;
  sim_cmd->add_option("--tier", tier, "disturbance tier (d1|d2|d3)");
  sim_cmd->add_option("--speed", speed, "longitudinal speed [m/s]");
  sim_cmd->add_option("--obstacle-width", obs_w, "obstacle width [m]");
  sim_cmd->add_option("--obstacle-length", obs_l, "obstacle length [m]");
  sim_cmd->add_option("--obstacle-pos", obs_p, "obstacle start position [m]");
  sim_cmd->add_option("--seed", seed, "disturbance seed");
  sim_cmd->add_option("--arch", arch, "architecture (rsca|sca)");
  sim_cmd->add_option("--out", out_dir, "output directory");
  sim_cmd->add_option("--psi-bound", psi_bound,
                      "curvature rate bound (default 0.5/speed)");
  sim_cmd->add_option("--ey0", ey0, "initial lateral offset [m]");

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "run a scenario batch");
  int n = 120, workers = 1;
  std::vector<int> tiers{40, 40, 40};
  std::uint64_t bseed = 1;
  std::string bout, cache_dir;
  bool traces = false;
  batch_cmd->add_option("--n", n, "number of scenarios");
  batch_cmd->add_option("--tiers", tiers, "per-tier counts (3 values)")
      ->expected(3);
  batch_cmd->add_option("--seed", bseed, "base seed");
  batch_cmd->add_option("--out", bout, "output directory");
  batch_cmd->add_option("--workers", workers, "worker threads");
  batch_cmd->add_option("--sets-cache", cache_dir,
                        "directory for synthesized-set cache files");
  batch_cmd->add_flag("--traces", traces, "write per-scenario trace CSVs");

  // synthesize
  auto* syn_cmd = app.add_subcommand("synthesize", "synthesize tube sets");
  std::string s_tier = "d1", cache_file;
  double s_speed = 10.0, s_eps = 0.5, s_psi = -1.0;
  syn_cmd->add_option("--tier", s_tier, "disturbance tier (d1|d2|d3)");
  syn_cmd->add_option("--speed", s_speed, "longitudinal speed [m/s]");
  syn_cmd->add_option("--epsilon", s_eps, "safe-reference relaxation [m]");
  syn_cmd->add_option("--psi-bound", s_psi,
                      "curvature rate bound (default 0.5/speed)");
  syn_cmd->add_option("--cache", cache_file, "write sets to this file");

  // verify-sets
  auto* ver_cmd =
      app.add_subcommand("verify-sets", "run invariant-set certificates");
  double v_speed = 10.0, v_eps = 0.5, v_psi = -1.0;
  ver_cmd->add_option("--speed", v_speed, "longitudinal speed [m/s]");
  ver_cmd->add_option("--epsilon", v_eps, "safe-reference relaxation [m]");
  ver_cmd->add_option("--psi-bound", v_psi,
                      "curvature rate bound (default 0.5/speed)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      return cmd_simulate(tier, speed, obs_w, obs_l, obs_p, seed, arch,
                          out_dir, psi_bound, ey0);
    }
    if (batch_cmd->parsed()) {
      return cmd_batch(n, tiers, bseed, bout, workers, cache_dir, traces);
    }
    if (syn_cmd->parsed()) {
      return cmd_synthesize(s_tier, s_speed, s_eps, s_psi, cache_file);
    }
    if (ver_cmd->parsed()) {
      return cmd_verify_sets(v_speed, v_eps, v_psi);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
