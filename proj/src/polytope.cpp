#include "rsca/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "rsca/lp.hpp"

namespace rsca::geom {

namespace {

double scale_of(const Eigen::VectorXd& h) {
  double s = 1.0;
  for (int i = 0; i < h.size(); ++i) s = std::max(s, std::abs(h(i)));
  return s;
}

// Iterate over k-subsets of {0..n-1}; returns false when exhausted.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

double combination_count(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

}  // namespace

Polytope::Polytope(Eigen::MatrixXd h_mat, Eigen::VectorXd h_vec)
    : h_mat_(std::move(h_mat)), h_vec_(std::move(h_vec)) {
  if (h_mat_.rows() != h_vec_.size()) {
    throw PolytopeError("polytope: row count of H must equal length of h");
  }
  if (h_mat_.cols() < 1) {
    throw PolytopeError("polytope: dimension must be positive");
  }
  dim_ = static_cast<int>(h_mat_.cols());
  for (int i = 0; i < h_mat_.rows(); ++i) {
    const double n = h_mat_.row(i).norm();
    if (n > tol::rank) {
      h_mat_.row(i) /= n;
      h_vec_(i) /= n;
    }
    // zero rows are kept verbatim: harmless when h >= 0, and they encode
    // emptiness when h < 0, which the LP layer detects
  }
}

Polytope Polytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int d = static_cast<int>(lo.size());
  Eigen::MatrixXd h_mat(2 * d, d);
  Eigen::VectorXd h_vec(2 * d);
  h_mat.topRows(d) = Eigen::MatrixXd::Identity(d, d);
  h_mat.bottomRows(d) = -Eigen::MatrixXd::Identity(d, d);
  h_vec.head(d) = hi;
  h_vec.tail(d) = -lo;
  return Polytope(std::move(h_mat), std::move(h_vec));
}

Polytope Polytope::interval(double lo, double hi) {
  Eigen::VectorXd l(1), u(1);
  l << lo;
  u << hi;
  return box(l, u);
}

Polytope Polytope::singleton(const Eigen::VectorXd& point) {
  return box(point, point);
}

double Polytope::support(const Eigen::VectorXd& d) const {
  if (d.size() != dim_) throw PolytopeError("support: direction dimension mismatch");
  if (d.norm() <= tol::rank) throw PolytopeError("support: zero direction");
  lp::Result r = lp::support_lp(d, h_mat_, h_vec_);
  switch (r.status) {
    case lp::Status::optimal:
      return r.objective;
    case lp::Status::infeasible:
      throw EmptyPolytopeError("empty polytope");
    case lp::Status::unbounded:
      throw ImproperPolytopeError("improper polytope");
    default:
      throw PolytopeError("support: LP failure");
  }
}

bool Polytope::contains_point(const Eigen::VectorXd& x, double tolerance) const {
  if (x.size() != dim_) throw PolytopeError("contains_point: dimension mismatch");
  if (h_vec_.size() == 0) return true;
  return ((h_mat_ * x - h_vec_).maxCoeff() <= tolerance);
}

bool Polytope::is_empty() const {
  return lp::halfspace_system_empty(h_mat_, h_vec_);
}

bool Polytope::is_bounded() const {
  for (int i = 0; i < dim_; ++i) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim_);
      d(i) = s;
      lp::Result r = lp::support_lp(d, h_mat_, h_vec_);
      if (r.status == lp::Status::unbounded) return false;
      if (r.status == lp::Status::infeasible) return true;  // empty is bounded
    }
  }
  return true;
}

Polytope Polytope::translated(const Eigen::VectorXd& t) const {
  if (t.size() != dim_) throw PolytopeError("translated: dimension mismatch");
  return Polytope(h_mat_, h_vec_ + h_mat_ * t);
}

std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> Polytope::as_box()
    const {
  if (num_facets() != 2 * dim_) return std::nullopt;
  Eigen::VectorXd lo(dim_), hi(dim_);
  std::vector<char> have_hi(dim_, 0), have_lo(dim_, 0);
  for (int r = 0; r < num_facets(); ++r) {
    int axis = -1;
    for (int j = 0; j < dim_; ++j) {
      if (std::abs(std::abs(h_mat_(r, j)) - 1.0) < 1e-12) {
        if (axis >= 0) return std::nullopt;
        axis = j;
      } else if (std::abs(h_mat_(r, j)) > 1e-12) {
        return std::nullopt;
      }
    }
    if (axis < 0) return std::nullopt;
    if (h_mat_(r, axis) > 0) {
      if (have_hi[axis]) return std::nullopt;
      hi(axis) = h_vec_(r);
      have_hi[axis] = 1;
    } else {
      if (have_lo[axis]) return std::nullopt;
      lo(axis) = -h_vec_(r);
      have_lo[axis] = 1;
    }
  }
  for (int j = 0; j < dim_; ++j) {
    if (!have_hi[j] || !have_lo[j]) return std::nullopt;
  }
  return std::make_pair(lo, hi);
}

std::string Polytope::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << dim_ << " " << num_facets() << "\n";
  for (int r = 0; r < num_facets(); ++r) {
    for (int j = 0; j < dim_; ++j) os << h_mat_(r, j) << " ";
    os << h_vec_(r) << "\n";
  }
  return os.str();
}

Polytope Polytope::from_text(const std::string& text) {
  std::istringstream is(text);
  int d = 0, m = 0;
  if (!(is >> d >> m) || d < 1 || m < 0) {
    throw PolytopeError("from_text: malformed header");
  }
  Eigen::MatrixXd h_mat(m, d);
  Eigen::VectorXd h_vec(m);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < d; ++j) {
      if (!(is >> h_mat(r, j))) throw PolytopeError("from_text: truncated row");
    }
    if (!(is >> h_vec(r))) throw PolytopeError("from_text: truncated row");
  }
  return Polytope(std::move(h_mat), std::move(h_vec));
}

VPolytope enumerate_vertices(const Polytope& p) {
  const int d = p.dim();
  const int m = p.num_facets();
  const Eigen::MatrixXd& H = p.facet_normals();
  const Eigen::VectorXd& h = p.facet_offsets();
  if (m < d) throw ImproperPolytopeError("improper polytope: too few facets");
  if (combination_count(m, d) > 2.5e7) {
    throw PolytopeError("enumerate_vertices: facet count too large");
  }
  const double s = scale_of(h);
  const double feas_tol = tol::feasibility * std::max(1.0, s);
  const double dedupe_tol = std::max(1e-12, 1e-9 * s);

  std::vector<Eigen::VectorXd> verts;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  do {
    Eigen::MatrixXd A(d, d);
    Eigen::VectorXd b(d);
    for (int i = 0; i < d; ++i) {
      A.row(i) = H.row(idx[i]);
      b(i) = h(idx[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(tol::rank);
    if (lu.rank() < d) continue;
    Eigen::VectorXd x = lu.solve(b);
    if (((H * x - h).array() > feas_tol).any()) continue;
    bool dup = false;
    for (const auto& v : verts) {
      if ((v - x).lpNorm<Eigen::Infinity>() < dedupe_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) verts.push_back(std::move(x));
  } while (next_combination(idx, m));

  if (verts.empty()) {
    if (p.is_empty()) throw EmptyPolytopeError("empty polytope");
    throw ImproperPolytopeError("improper polytope: no vertices");
  }
  VPolytope v;
  v.vertices.resize(static_cast<int>(verts.size()), d);
  for (size_t i = 0; i < verts.size(); ++i) {
    v.vertices.row(static_cast<int>(i)) = verts[i];
  }
  return v;
}

VPolytope hull_vertices(const VPolytope& v) {
  const int n = v.count();
  const int d = v.dim();
  if (n <= d + 1) return v;
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) {
    // is point i a convex combination of the other alive points?
    std::vector<int> others;
    for (int j = 0; j < n; ++j) {
      if (j != i && alive[j]) others.push_back(j);
    }
    if (others.empty()) continue;
    Eigen::MatrixXd eq(d + 1, others.size());
    for (size_t k = 0; k < others.size(); ++k) {
      eq.block(0, static_cast<int>(k), d, 1) =
          v.vertices.row(others[k]).transpose();
      eq(d, static_cast<int>(k)) = 1.0;
    }
    Eigen::VectorXd rhs(d + 1);
    rhs.head(d) = v.vertices.row(i).transpose();
    rhs(d) = 1.0;
    lp::Result r = lp::solve_standard(
        Eigen::VectorXd::Zero(static_cast<int>(others.size())), eq, rhs);
    if (r.status == lp::Status::optimal) alive[i] = 0;
  }
  int kept = 0;
  for (int i = 0; i < n; ++i) kept += alive[i];
  VPolytope out;
  out.vertices.resize(kept, d);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (alive[i]) out.vertices.row(r++) = v.vertices.row(i);
  }
  return out;
}

namespace {

// Facets of a full-dimensional point cloud in dimension rd >= 2 via
// hyperplane-combination enumeration with one-side filtering.
void facets_full_dim(const Eigen::MatrixXd& pts,
                     std::vector<Eigen::VectorXd>& normals,
                     std::vector<double>& offsets) {
  const int n = static_cast<int>(pts.rows());
  const int rd = static_cast<int>(pts.cols());
  const double geom_scale =
      std::max(1.0, pts.cwiseAbs().maxCoeff());
  const double side_tol = 1e-9 * geom_scale;

  if (combination_count(n, rd) * n > 4e8) {
    throw PolytopeError("convex_hull: point cloud too large");
  }

  auto add_facet = [&](const Eigen::VectorXd& nrm, double off) {
    for (size_t k = 0; k < normals.size(); ++k) {
      if ((normals[k] - nrm).lpNorm<Eigen::Infinity>() < 1e-9 &&
          std::abs(offsets[k] - off) < side_tol) {
        return;
      }
    }
    normals.push_back(nrm);
    offsets.push_back(off);
  };

  std::vector<int> idx(rd);
  for (int i = 0; i < rd; ++i) idx[i] = i;
  do {
    Eigen::MatrixXd diffs(rd - 1, rd);
    for (int i = 1; i < rd; ++i) {
      diffs.row(i - 1) = pts.row(idx[i]) - pts.row(idx[0]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullV);
    if (rd > 1 && svd.singularValues()(rd - 2) <= tol::rank * geom_scale) {
      continue;  // affinely dependent subset
    }
    Eigen::VectorXd nrm = svd.matrixV().col(rd - 1);
    const double c0 = nrm.dot(pts.row(idx[0]));
    double lo = c0, hi = c0;
    for (int j = 0; j < n; ++j) {
      const double val = nrm.dot(pts.row(j));
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    if (hi <= c0 + side_tol) add_facet(nrm, c0);
    if (lo >= c0 - side_tol) add_facet(-nrm, -c0);
  } while (next_combination(idx, n));
}

}  // namespace

Polytope convex_hull(const VPolytope& v) {
  const int n = v.count();
  const int d = v.dim();
  if (n < 1) throw EmptyPolytopeError("convex_hull: no points");

  // affine-hull reduction
  Eigen::RowVectorXd center = v.vertices.colwise().mean();
  Eigen::MatrixXd centered = v.vertices.rowwise() - center;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
  const double geom_scale = std::max(1.0, v.vertices.cwiseAbs().maxCoeff());
  int rank = 0;
  const int sv_count = static_cast<int>(svd.singularValues().size());
  for (int i = 0; i < sv_count; ++i) {
    if (svd.singularValues()(i) > 1e-9 * geom_scale) ++rank;
  }

  std::vector<Eigen::VectorXd> normals;
  std::vector<double> offsets;

  if (rank >= 1) {
    Eigen::MatrixXd basis = svd.matrixV().leftCols(rank);
    Eigen::MatrixXd reduced = centered * basis;  // n x rank
    if (rank == 1) {
      const double lo = reduced.col(0).minCoeff();
      const double hi = reduced.col(0).maxCoeff();
      Eigen::VectorXd one(1);
      one << 1.0;
      normals.push_back(one);
      offsets.push_back(hi);
      normals.push_back(-one);
      offsets.push_back(-lo);
    } else {
      facets_full_dim(reduced, normals, offsets);
    }
    // lift back: n_hat'(B'(x - c)) <= off  ->  (B n_hat)' x <= off + (B n_hat)'c
    for (size_t k = 0; k < normals.size(); ++k) {
      Eigen::VectorXd lifted = basis * normals[k];
      offsets[k] += lifted.dot(center.transpose());
      normals[k] = lifted;
    }
  }
  // affine-hull equalities for the flat directions (full V basis)
  for (int i = rank; i < d; ++i) {
    Eigen::VectorXd nd = svd.matrixV().col(i);
    const double c = nd.dot(center.transpose());
    normals.push_back(nd);
    offsets.push_back(c);
    normals.push_back(-nd);
    offsets.push_back(-c);
  }

  Eigen::MatrixXd H(static_cast<int>(normals.size()), d);
  Eigen::VectorXd h(static_cast<int>(normals.size()));
  for (size_t k = 0; k < normals.size(); ++k) {
    H.row(static_cast<int>(k)) = normals[k].transpose();
    h(static_cast<int>(k)) = offsets[k];
  }
  return Polytope(std::move(H), std::move(h));
}

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) {
    throw PolytopeError("minkowski_sum: dimension mismatch");
  }
  VPolytope vp = enumerate_vertices(p);
  VPolytope vq = enumerate_vertices(q);
  if (vp.count() == 1) return q.translated(vp.vertices.row(0).transpose());
  if (vq.count() == 1) return p.translated(vq.vertices.row(0).transpose());

  VPolytope sums;
  sums.vertices.resize(vp.count() * vq.count(), p.dim());
  int r = 0;
  for (int i = 0; i < vp.count(); ++i) {
    for (int j = 0; j < vq.count(); ++j) {
      sums.vertices.row(r++) = vp.vertices.row(i) + vq.vertices.row(j);
    }
  }
  if (sums.count() > 64) sums = hull_vertices(sums);
  return remove_redundancy(convex_hull(sums));
}

Polytope pontryagin_diff(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) {
    throw PolytopeError("pontryagin_diff: dimension mismatch");
  }
  const Eigen::MatrixXd& H = p.facet_normals();
  Eigen::VectorXd h = p.facet_offsets();
  for (int i = 0; i < p.num_facets(); ++i) {
    if (H.row(i).norm() <= tol::rank) continue;
    h(i) -= q.support(H.row(i).transpose());
  }
  return Polytope(H, std::move(h));
}

Polytope linear_map(const Eigen::MatrixXd& m, const Polytope& p) {
  if (m.cols() != p.dim()) throw PolytopeError("linear_map: dimension mismatch");
  VPolytope v = enumerate_vertices(p);
  VPolytope mapped;
  mapped.vertices = v.vertices * m.transpose();
  if (mapped.count() > 64) mapped = hull_vertices(mapped);
  return convex_hull(mapped);
}

bool contains_set(const Polytope& p, const Polytope& q, double tolerance) {
  if (p.dim() != q.dim()) throw PolytopeError("contains_set: dimension mismatch");
  if (q.is_empty()) return true;
  const Eigen::MatrixXd& H = p.facet_normals();
  const Eigen::VectorXd& h = p.facet_offsets();
  for (int i = 0; i < p.num_facets(); ++i) {
    if (H.row(i).norm() <= tol::rank) {
      if (h(i) < -tolerance) return false;
      continue;
    }
    if (q.support(H.row(i).transpose()) > h(i) + tolerance) return false;
  }
  return true;
}

Polytope remove_redundancy(const Polytope& p) {
  if (p.is_empty()) throw EmptyPolytopeError("remove_redundancy: empty polytope");
  const Eigen::MatrixXd& H = p.facet_normals();
  const Eigen::VectorXd& h = p.facet_offsets();
  const int m = p.num_facets();
  std::vector<char> alive(m, 1);
  for (int i = 0; i < m; ++i) {
    if (H.row(i).norm() <= tol::rank) {
      alive[i] = 0;  // trivial row (offset must be >= 0 since set is nonempty)
      continue;
    }
    // maximize H_i x over the other alive rows, with row i relaxed by +1
    // so the relaxed problem stays bounded
    std::vector<int> rows;
    for (int j = 0; j < m; ++j) {
      if (j != i && alive[j]) rows.push_back(j);
    }
    Eigen::MatrixXd A(rows.size() + 1, p.dim());
    Eigen::VectorXd b(rows.size() + 1);
    for (size_t k = 0; k < rows.size(); ++k) {
      A.row(static_cast<int>(k)) = H.row(rows[k]);
      b(static_cast<int>(k)) = h(rows[k]);
    }
    A.row(static_cast<int>(rows.size())) = H.row(i);
    b(static_cast<int>(rows.size())) = h(i) + 1.0;
    lp::Result r = lp::support_lp(H.row(i).transpose(), A, b);
    if (r.status == lp::Status::optimal && r.objective <= h(i) + tol::redundancy) {
      alive[i] = 0;
    }
  }
  int kept = 0;
  for (int i = 0; i < m; ++i) kept += alive[i];
  Eigen::MatrixXd Hn(kept, p.dim());
  Eigen::VectorXd hn(kept);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    if (alive[i]) {
      Hn.row(r) = H.row(i);
      hn(r) = h(i);
      ++r;
    }
  }
  return Polytope(std::move(Hn), std::move(hn));
}

Polytope scale(const Polytope& p, double alpha) {
  if (alpha < 0.0) throw PolytopeError("scale: negative factor");
  return Polytope(p.facet_normals(), p.facet_offsets() * alpha);
}

}  // namespace rsca::geom
