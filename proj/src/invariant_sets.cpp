#include "rsca/invariant_sets.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rsca::invariant {

using geom::Polytope;

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

GainSynthesis dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != b.cols() || r.cols() != b.cols()) {
    throw std::invalid_argument("dare_gain: inconsistent dimensions");
  }
  if (b.norm() <= 1e-14 && spectral_radius(a) >= 1.0 - 1e-12) {
    throw std::runtime_error("dare_gain: system not stabilizable (B = 0, A unstable)");
  }

  Eigen::MatrixXd p = q;
  const int max_iters = 100000;
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd btp = b.transpose() * p;
    Eigen::MatrixXd gain_den = r + btp * b;
    Eigen::MatrixXd btpa = btp * a;
    Eigen::MatrixXd p_next =
        q + a.transpose() * p * a -
        btpa.transpose() * gain_den.ldlt().solve(btpa);
    p_next = 0.5 * (p_next + p_next.transpose()).eval();
    const double diff = (p_next - p).cwiseAbs().maxCoeff();
    p = p_next;
    if (diff <= 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("dare_gain: Riccati iteration did not converge");
  }

  GainSynthesis g;
  g.p_weight = p;
  Eigen::MatrixXd gain_den = r + b.transpose() * p * b;
  g.k_gain = -gain_den.ldlt().solve(b.transpose() * p * a);
  g.a_k = a + b * g.k_gain;
  if (spectral_radius(g.a_k) >= 1.0 - 1e-12) {
    throw std::runtime_error("dare_gain: closed loop not stable");
  }
  return g;
}

GainSynthesis synthesize_gain(const vehicle::DiscreteModel& m,
                              const Eigen::Matrix4d& q_lqr, double r_lqr) {
  if (r_lqr <= 0.0) throw std::invalid_argument("synthesize_gain: r <= 0");
  Eigen::MatrixXd r(1, 1);
  r << r_lqr;
  return dare_gain(m.a, m.b, q_lqr, r);
}

namespace {

// Zonotope {center + G lambda : |lambda|_inf <= 1}; support is closed-form.
struct Zono {
  Eigen::VectorXd center;
  Eigen::MatrixXd gens;

  double support(const Eigen::VectorXd& d) const {
    double s = d.dot(center);
    for (int j = 0; j < gens.cols(); ++j) s += std::abs(d.dot(gens.col(j)));
    return s;
  }
};

// Facet normals of a full-dimensional zonotope: null directions of
// (dim-1)-subsets of generators.
std::vector<Eigen::VectorXd> zono_facet_normals(const Eigen::MatrixXd& gens) {
  const int dim = static_cast<int>(gens.rows());
  std::vector<Eigen::VectorXd> normals;
  if (dim == 1) {
    Eigen::VectorXd one(1);
    one << 1.0;
    normals.push_back(one);
    return normals;
  }
  const int m = static_cast<int>(gens.cols());
  std::vector<int> idx(dim - 1);
  for (int i = 0; i < dim - 1; ++i) idx[i] = i;
  auto next = [&]() {
    int i = dim - 2;
    while (i >= 0 && idx[i] == m - (dim - 1) + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < dim - 1; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd sub(dim - 1, dim);
    for (int i = 0; i < dim - 1; ++i) sub.row(i) = gens.col(idx[i]).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
    if (svd.singularValues()(dim - 2) <= geom::tol::rank) continue;
    Eigen::VectorXd n = svd.matrixV().col(dim - 1);
    for (int i = 0; i < dim; ++i) {
      if (std::abs(n(i)) > 1e-12) {
        if (n(i) < 0) n = -n;
        break;
      }
    }
    bool dup = false;
    for (const auto& q : normals) {
      if ((q - n).lpNorm<Eigen::Infinity>() < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) normals.push_back(std::move(n));
  } while (next());
  return normals;
}

Eigen::MatrixXd propagate_template(const Eigen::MatrixXd& a_k,
                                   const Eigen::MatrixXd& extra_dirs,
                                   int levels) {
  const int dim = static_cast<int>(a_k.rows());
  std::vector<Eigen::VectorXd> base;
  for (int i = 0; i < dim; ++i) base.push_back(Eigen::VectorXd::Unit(dim, i));
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      for (double sg : {1.0, -1.0}) {
        base.push_back(Eigen::VectorXd::Unit(dim, i) +
                       sg * Eigen::VectorXd::Unit(dim, j));
      }
    }
  }
  for (int r = 0; r < extra_dirs.rows(); ++r) {
    if (extra_dirs.row(r).norm() > 1e-12) {
      base.push_back(extra_dirs.row(r).transpose());
    }
  }

  std::vector<Eigen::VectorXd> dirs;
  Eigen::MatrixXd akt_pow = Eigen::MatrixXd::Identity(dim, dim);
  for (int lvl = 0; lvl <= levels; ++lvl) {
    for (const auto& b : base) {
      Eigen::VectorXd d = akt_pow * b;
      const double nn = d.norm();
      if (nn <= 1e-12) continue;
      d /= nn;
      for (int i = 0; i < dim; ++i) {
        if (std::abs(d(i)) > 1e-12) {
          if (d(i) < 0) d = -d;
          break;
        }
      }
      bool dup = false;
      for (const auto& q : dirs) {
        if ((q - d).lpNorm<Eigen::Infinity>() < 1e-8) {
          dup = true;
          break;
        }
      }
      if (!dup) dirs.push_back(std::move(d));
    }
    akt_pow = a_k.transpose() * akt_pow;
  }

  Eigen::MatrixXd rows(2 * dirs.size(), dim);
  for (size_t i = 0; i < dirs.size(); ++i) {
    rows.row(2 * static_cast<int>(i)) = dirs[i].transpose();
    rows.row(2 * static_cast<int>(i) + 1) = -dirs[i].transpose();
  }
  return rows;
}

}  // namespace

geom::Polytope compute_Z(const Eigen::MatrixXd& a_k,
                         const geom::Polytope& d_set,
                         const Eigen::MatrixXd& extra_dirs,
                         RakovicInfo* info) {
  const int dim = static_cast<int>(a_k.rows());
  if (d_set.dim() != dim) throw std::invalid_argument("compute_Z: dimension mismatch");
  if (spectral_radius(a_k) >= 1.0 - 1e-12) {
    throw std::runtime_error("compute_Z: a_k is not strictly stable");
  }
  if (!d_set.contains_point(Eigen::VectorXd::Zero(dim))) {
    throw std::runtime_error("compute_Z: disturbance set must contain the origin");
  }

  // W = D (+) a_k D: support function and facet normals.
  SupportFn sup_w;
  std::vector<Eigen::VectorXd> w_normals;
  auto box = d_set.as_box();
  const bool box_path =
      box.has_value() && ((box->second - box->first).minCoeff() > 1e-12);
  Zono wz;
  if (box_path) {
    Eigen::VectorXd c = 0.5 * (box->first + box->second);
    Eigen::MatrixXd g = (0.5 * (box->second - box->first)).asDiagonal();
    wz.center = c + a_k * c;
    wz.gens.resize(dim, 2 * dim);
    wz.gens << g, a_k * g;
    sup_w = [wz](const Eigen::VectorXd& v) { return wz.support(v); };
    w_normals = zono_facet_normals(wz.gens);
  } else {
    Polytope w = geom::minkowski_sum(d_set, geom::linear_map(a_k, d_set));
    sup_w = polytope_support_fn(w);
    for (int i = 0; i < w.num_facets(); ++i) {
      if (w.facet_normals().row(i).norm() > geom::tol::rank) {
        w_normals.push_back(w.facet_normals().row(i).transpose());
      }
    }
    if (w_normals.empty()) {
      // W is a point at the origin; fall back to axis directions
      for (int i = 0; i < dim; ++i) {
        w_normals.push_back(Eigen::VectorXd::Unit(dim, i));
      }
    }
  }

  std::vector<double> w_offsets;
  w_offsets.reserve(w_normals.size());
  for (const auto& n : w_normals) w_offsets.push_back(sup_w(n));

  // smallest s with a_k^s W inside alpha W (alpha target 0.05)
  constexpr double kAlphaTarget = 0.05;
  constexpr int kMaxS = 200;
  int s_found = -1;
  double alpha = 0.0;
  std::vector<Eigen::VectorXd> dirs(w_normals);  // (a_k')^s n per facet
  for (int s = 1; s <= kMaxS; ++s) {
    for (auto& d : dirs) d = a_k.transpose() * d;
    double worst = 0.0;
    bool ok = true;
    for (size_t f = 0; f < w_normals.size(); ++f) {
      const double num = sup_w(dirs[f]);
      const double den = w_offsets[f];
      if (den <= 1e-14) {
        if (num > 1e-14) { ok = false; break; }
        continue;
      }
      const double ratio = num / den;
      worst = std::max(worst, ratio);
      if (ratio > kAlphaTarget + 1e-14) { ok = false; break; }
    }
    if (ok) {
      s_found = s;
      alpha = worst;
      break;
    }
  }
  if (s_found < 0) {
    throw std::runtime_error(
        "compute_Z: no contraction exponent s <= 200 (disturbance too large "
        "or a_k too slow)");
  }

  // support of F(alpha, s) = (1-alpha)^-1 sum_{i<s} a_k^i W
  auto sup_f = [&](const Eigen::VectorXd& n) {
    double acc = 0.0;
    Eigen::VectorXd v = n;
    for (int i = 0; i < s_found; ++i) {
      acc += sup_w(v);
      v = a_k.transpose() * v;
    }
    return acc / (1.0 - alpha);
  };

  // invariant template hull
  Eigen::MatrixXd rows = propagate_template(a_k, extra_dirs, 10);
  const int m = static_cast<int>(rows.rows());
  Eigen::VectorXd offs(m);
  Eigen::VectorXd cw(m);
  for (int i = 0; i < m; ++i) {
    offs(i) = sup_f(rows.row(i).transpose());
    cw(i) = sup_w(rows.row(i).transpose());
  }

  const double scale = std::max(1.0, offs.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 200; ++sweep) {
    Polytope zt(rows, offs);
    bool changed = false;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd v = a_k.transpose() * rows.row(i).transpose();
      const double sup_map = (v.norm() > geom::tol::rank) ? zt.support(v) : 0.0;
      const double val = sup_map + cw(i);
      if (val > offs(i) + 1e-12 * scale) {
        offs(i) = val;
        changed = true;
      }
    }
    if (!changed) break;
    if (sweep == 199) {
      throw std::runtime_error("compute_Z: template iteration did not settle");
    }
  }

  Polytope z = geom::remove_redundancy(Polytope(rows, offs));

  // Eq.-style invariance certificate before returning:
  //   support(a_k Z, n) + support(D, n) + support(a_k D, n) <= h(n)
  for (int i = 0; i < z.num_facets(); ++i) {
    const Eigen::VectorXd n = z.facet_normals().row(i).transpose();
    const Eigen::VectorXd v = a_k.transpose() * n;
    double lhs = (v.norm() > geom::tol::rank)
                     ? (z.support(v) + d_set.support(v))
                     : 0.0;
    lhs += d_set.support(n);
    if (lhs > z.facet_offsets()(i) + geom::tol::feasibility) {
      throw std::runtime_error("compute_Z: invariance verification failed");
    }
  }

  if (info) {
    info->s = s_found;
    info->alpha = alpha;
    info->template_rows = z.num_facets();
  }
  return z;
}

SupportFn polytope_support_fn(const geom::Polytope& p) {
  return [p](const Eigen::VectorXd& d) { return p.support(d); };
}

geom::Polytope maximal_rpi(const Eigen::MatrixXd& a_k,
                           const geom::Polytope& constraint_set,
                           const SupportFn& dist_support, int max_sweeps) {
  const int dim = constraint_set.dim();
  auto empty_marker = [dim]() {
    return Polytope::box(Eigen::VectorXd::Ones(dim),
                         -Eigen::VectorXd::Ones(dim));
  };
  if (constraint_set.is_empty()) return empty_marker();
  Polytope omega = geom::remove_redundancy(constraint_set);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Eigen::MatrixXd& n_rows = omega.facet_normals();
    const Eigen::VectorXd& offs = omega.facet_offsets();
    std::vector<Eigen::VectorXd> add_rows;
    std::vector<double> add_offs;
    for (int i = 0; i < omega.num_facets(); ++i) {
      Eigen::VectorXd n = n_rows.row(i).transpose();
      if (n.norm() <= geom::tol::rank) continue;
      Eigen::VectorXd pre = a_k.transpose() * n;
      const double off = offs(i) - dist_support(n);
      if (pre.norm() <= geom::tol::rank) {
        if (off < -geom::tol::redundancy) return empty_marker();
        continue;
      }
      double sup;
      try {
        sup = omega.support(pre);
      } catch (const geom::EmptyPolytopeError&) {
        return empty_marker();
      }
      if (sup > off + geom::tol::redundancy) {
        add_rows.push_back(std::move(pre));
        add_offs.push_back(off);
      }
    }
    if (add_rows.empty()) return omega;

    Eigen::MatrixXd h_new(omega.num_facets() + add_rows.size(), dim);
    Eigen::VectorXd o_new(omega.num_facets() + add_rows.size());
    h_new.topRows(omega.num_facets()) = n_rows;
    o_new.head(omega.num_facets()) = offs;
    for (size_t k = 0; k < add_rows.size(); ++k) {
      h_new.row(omega.num_facets() + static_cast<int>(k)) =
          add_rows[k].transpose();
      o_new(omega.num_facets() + static_cast<int>(k)) = add_offs[k];
    }
    Polytope candidate(std::move(h_new), std::move(o_new));
    if (candidate.is_empty()) return empty_marker();
    omega = geom::remove_redundancy(candidate);
  }
  throw std::runtime_error("maximal_rpi: no fixed point after sweep limit");
}

SafeReference make_safe_reference(Side side, double road_half_width,
                                  double vehicle_width, double epsilon) {
  SafeReference sr;
  sr.side = side;
  sr.epsilon = epsilon;
  const double y = road_half_width - 0.5 * vehicle_width - 0.5 * epsilon;
  sr.x_sr << (side == Side::top ? y : -y), 0.0, 0.0, 0.0;
  return sr;
}

geom::Polytope compute_terminal_set(const vehicle::DiscreteModel& m,
                                    const GainSynthesis& gain,
                                    const geom::Polytope& d_set,
                                    std::pair<double, double> psi_bounds,
                                    const SafeReference& sr,
                                    const geom::Polytope& x_cons,
                                    const geom::Polytope& u_cons) {
  if (x_cons.dim() != 4 || d_set.dim() != 4 || u_cons.dim() != 1) {
    throw std::invalid_argument("compute_terminal_set: bad dimensions");
  }
  const Eigen::Matrix4d a_k = gain.a_k;
  const Eigen::Vector4d shift = (m.a - Eigen::Matrix4d::Identity()) * sr.x_sr;
  const double psi_mid = 0.5 * (psi_bounds.first + psi_bounds.second);
  const double psi_half = 0.5 * (psi_bounds.second - psi_bounds.first);
  if (psi_half < 0) throw std::invalid_argument("compute_terminal_set: psi bounds reversed");

  // D~ = D (+) E Psi (+) {(A - I) x_sr}
  SupportFn sup_dtilde;
  auto box = d_set.as_box();
  if (box.has_value()) {
    Zono dz;
    dz.center = 0.5 * (box->first + box->second) + m.e * psi_mid + shift;
    Eigen::MatrixXd g(4, 5);
    g << Eigen::MatrixXd((0.5 * (box->second - box->first)).asDiagonal()),
        m.e * psi_half;
    dz.gens = g;
    sup_dtilde = [dz](const Eigen::VectorXd& v) { return dz.support(v); };
  } else {
    Polytope psi_int = Polytope::interval(psi_bounds.first, psi_bounds.second);
    Polytope e_psi = geom::linear_map(m.e, psi_int);
    Polytope dtilde = geom::minkowski_sum(d_set, e_psi).translated(shift);
    sup_dtilde = polytope_support_fn(dtilde);
  }

  // shifted constraint set with the input rows K q in U folded in
  Polytope q_cons = x_cons.translated(-sr.x_sr);
  const int mq = q_cons.num_facets();
  const int mu = u_cons.num_facets();
  Eigen::MatrixXd rows(mq + mu, 4);
  Eigen::VectorXd offs(mq + mu);
  rows.topRows(mq) = q_cons.facet_normals();
  offs.head(mq) = q_cons.facet_offsets();
  for (int i = 0; i < mu; ++i) {
    rows.row(mq + i) = u_cons.facet_normals()(i, 0) * gain.k_gain.row(0);
    offs(mq + i) = u_cons.facet_offsets()(i);
  }
  Polytope omega0(std::move(rows), std::move(offs));

  Polytope omega = maximal_rpi(a_k, omega0, sup_dtilde);
  if (omega.is_empty()) return omega;  // signalled: no robust terminal set
  return omega.translated(sr.x_sr);
}

bool check_rpi(const geom::Polytope& omega, const Eigen::MatrixXd& a_k,
               const geom::Polytope& w) {
  if (omega.dim() != a_k.cols() || w.dim() != omega.dim()) {
    throw std::invalid_argument("check_rpi: dimension mismatch");
  }
  const Eigen::MatrixXd& n_rows = omega.facet_normals();
  const Eigen::VectorXd& offs = omega.facet_offsets();
  for (int i = 0; i < omega.num_facets(); ++i) {
    Eigen::VectorXd n = n_rows.row(i).transpose();
    if (n.norm() <= geom::tol::rank) continue;
    Eigen::VectorXd v = a_k.transpose() * n;
    double lhs = (v.norm() > geom::tol::rank) ? omega.support(v) : 0.0;
    lhs += w.support(n);
    if (lhs > offs(i) + geom::tol::feasibility) return false;
  }
  return true;
}

TubeSets synthesize_tube_sets(const vehicle::DiscreteModel& m,
                              const GainSynthesis& gain, double tier_delta,
                              std::pair<double, double> psi_bounds,
                              const SynthesisConfig& cfg) {
  if (tier_delta < 0) throw std::invalid_argument("synthesize_tube_sets: negative tier");
  const Eigen::Vector4d ones = Eigen::Vector4d::Ones();
  Polytope d_set = Polytope::box(-tier_delta * ones, tier_delta * ones);

  RakovicInfo info;
  Polytope z = compute_Z(gain.a_k, d_set, gain.k_gain, &info);

  TubeSets t{z,
             Polytope::interval(0, 0),
             Polytope::interval(0, 0),
             Polytope::interval(0, 0),
             Polytope::interval(0, 0),
             d_set};
  t.tier_delta = tier_delta;
  t.psi_bounds = psi_bounds;
  t.rakovic = info;

  for (int i = 0; i < 4; ++i) {
    t.z_support_pos(i) = z.support(Eigen::Vector4d::Unit(i));
    t.z_support_neg(i) = z.support(-Eigen::Vector4d::Unit(i));
    t.d_support_axis(i) = tier_delta;
  }
  const Eigen::Vector4d kt = gain.k_gain.row(0).transpose();
  const double kz_pos = z.support(kt);
  const double kz_neg = z.support(-kt);
  const double kd_pos = tier_delta * kt.cwiseAbs().sum();
  const double kd_neg = kd_pos;

  t.u_lo_controller = -cfg.u_max + kz_neg;
  t.u_hi_controller = cfg.u_max - kz_pos;
  t.u_lo_supervisor = t.u_lo_controller + kd_neg;
  t.u_hi_supervisor = t.u_hi_controller - kd_pos;
  t.u_tight_controller =
      Polytope::interval(t.u_lo_controller, t.u_hi_controller);
  t.u_tight_supervisor =
      Polytope::interval(t.u_lo_supervisor, t.u_hi_supervisor);

  const double band_hi = cfg.road_half_width - 0.5 * cfg.vehicle_width;
  Polytope u_cons = Polytope::interval(-cfg.u_max, cfg.u_max);
  for (Side side : {Side::top, Side::bottom}) {
    Eigen::Vector4d lo, hi;
    if (side == Side::top) {
      lo << band_hi - cfg.epsilon, -cfg.bounds.de_y, -cfg.bounds.e_psi,
          -cfg.bounds.de_psi;
      hi << band_hi, cfg.bounds.de_y, cfg.bounds.e_psi, cfg.bounds.de_psi;
    } else {
      lo << -band_hi, -cfg.bounds.de_y, -cfg.bounds.e_psi, -cfg.bounds.de_psi;
      hi << -band_hi + cfg.epsilon, cfg.bounds.de_y, cfg.bounds.e_psi,
          cfg.bounds.de_psi;
    }
    Polytope x_cons = Polytope::box(lo, hi);
    SafeReference sr = make_safe_reference(side, cfg.road_half_width,
                                           cfg.vehicle_width, cfg.epsilon);
    Polytope xn =
        compute_terminal_set(m, gain, d_set, psi_bounds, sr, x_cons, u_cons);
    if (xn.is_empty()) {
      throw std::runtime_error(
          "synthesize_tube_sets: no robust terminal set for this "
          "epsilon/psi/disturbance configuration");
    }
    if (side == Side::top) {
      t.x_terminal_top = xn;
      t.x_sr_top = sr.x_sr;
    } else {
      t.x_terminal_bottom = xn;
      t.x_sr_bottom = sr.x_sr;
    }
  }
  return t;
}

namespace {

void put_poly(std::ostream& os, const char* tag, const Polytope& p) {
  os << tag << "\n" << p.to_text();
}

Polytope get_poly(std::istream& is, const std::string& tag) {
  std::string got;
  is >> got;
  if (got != tag) throw std::runtime_error("TubeSets::from_text: expected " + tag);
  int d = 0, m = 0;
  is >> d >> m;
  std::ostringstream block;
  block << std::setprecision(17);
  block << d << " " << m << "\n";
  double v = 0;
  for (int i = 0; i < m * (d + 1); ++i) {
    if (!(is >> v)) throw std::runtime_error("TubeSets::from_text: truncated " + tag);
    block << v << " ";
  }
  return Polytope::from_text(block.str());
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string TubeSets::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "rsca-tube-sets v1\n";
  os << "tier " << tier_delta << "\n";
  os << "psi " << psi_bounds.first << " " << psi_bounds.second << "\n";
  os << "rakovic " << rakovic.s << " " << rakovic.alpha << " "
     << rakovic.template_rows << "\n";
  os << "zsup";
  for (int i = 0; i < 4; ++i) os << " " << z_support_pos(i);
  for (int i = 0; i < 4; ++i) os << " " << z_support_neg(i);
  for (int i = 0; i < 4; ++i) os << " " << d_support_axis(i);
  os << "\n";
  os << "ubounds " << u_lo_supervisor << " " << u_hi_supervisor << " "
     << u_lo_controller << " " << u_hi_controller << "\n";
  os << "xsr";
  for (int i = 0; i < 4; ++i) os << " " << x_sr_top(i);
  for (int i = 0; i < 4; ++i) os << " " << x_sr_bottom(i);
  os << "\n";
  put_poly(os, "z", z);
  put_poly(os, "xn_top", x_terminal_top);
  put_poly(os, "xn_bottom", x_terminal_bottom);
  put_poly(os, "u_sup", u_tight_supervisor);
  put_poly(os, "u_con", u_tight_controller);
  put_poly(os, "d", d_set);
  return os.str();
}

TubeSets TubeSets::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string w1, w2;
  is >> w1 >> w2;
  if (w1 != "rsca-tube-sets" || w2 != "v1") {
    throw std::runtime_error("TubeSets::from_text: bad header");
  }
  TubeSets t{Polytope::interval(0, 0), Polytope::interval(0, 0),
             Polytope::interval(0, 0), Polytope::interval(0, 0),
             Polytope::interval(0, 0), Polytope::interval(0, 0)};
  std::string tag;
  is >> tag >> t.tier_delta;
  is >> tag >> t.psi_bounds.first >> t.psi_bounds.second;
  is >> tag >> t.rakovic.s >> t.rakovic.alpha >> t.rakovic.template_rows;
  is >> tag;
  for (int i = 0; i < 4; ++i) is >> t.z_support_pos(i);
  for (int i = 0; i < 4; ++i) is >> t.z_support_neg(i);
  for (int i = 0; i < 4; ++i) is >> t.d_support_axis(i);
  is >> tag >> t.u_lo_supervisor >> t.u_hi_supervisor >> t.u_lo_controller >>
      t.u_hi_controller;
  is >> tag;
  for (int i = 0; i < 4; ++i) is >> t.x_sr_top(i);
  for (int i = 0; i < 4; ++i) is >> t.x_sr_bottom(i);
  t.z = get_poly(is, "z");
  t.x_terminal_top = get_poly(is, "xn_top");
  t.x_terminal_bottom = get_poly(is, "xn_bottom");
  t.u_tight_supervisor = get_poly(is, "u_sup");
  t.u_tight_controller = get_poly(is, "u_con");
  t.d_set = get_poly(is, "d");
  return t;
}

std::string synthesis_cache_key(const vehicle::DiscreteModel& m,
                                double tier_delta,
                                std::pair<double, double> psi_bounds,
                                const SynthesisConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << m.ts << " ";
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) os << m.a(i, j) << " ";
  for (int i = 0; i < 4; ++i) os << m.b(i) << " " << m.e(i) << " ";
  os << tier_delta << " " << psi_bounds.first << " " << psi_bounds.second
     << " " << cfg.road_half_width << " " << cfg.vehicle_width << " "
     << cfg.epsilon << " " << cfg.u_max << " " << cfg.bounds.de_y << " "
     << cfg.bounds.e_psi << " " << cfg.bounds.de_psi;
  std::ostringstream hex;
  hex << std::hex << fnv1a64(os.str());
  return hex.str();
}

}  // namespace rsca::invariant
