#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsca::geom {

// Centralized tolerances used by all chained set operations.
namespace tol {
constexpr double feasibility = 1e-7;  // membership / containment slack
constexpr double redundancy = 1e-9;   // facet irredundancy margin
constexpr double rank = 1e-10;        // rank decisions in enumeration
}  // namespace tol

struct PolytopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyPolytopeError : PolytopeError {
  using PolytopeError::PolytopeError;
};
struct ImproperPolytopeError : PolytopeError {
  using PolytopeError::PolytopeError;
};

// Convex polytope in halfspace form {x : H x <= h}. Immutable after
// construction; all operations return new values. Nonzero rows are
// normalized on construction so offsets carry consistent units.
class Polytope {
 public:
  // default: the 1-D singleton {0}
  Polytope() : Polytope(interval_rows(), Eigen::Vector2d::Zero()) {}
  Polytope(Eigen::MatrixXd h_mat, Eigen::VectorXd h_vec);

  static Polytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static Polytope interval(double lo, double hi);
  static Polytope singleton(const Eigen::VectorXd& point);

  int dim() const { return dim_; }
  int num_facets() const { return static_cast<int>(h_vec_.size()); }
  const Eigen::MatrixXd& facet_normals() const { return h_mat_; }
  const Eigen::VectorXd& facet_offsets() const { return h_vec_; }

  // max d'x over the set; throws EmptyPolytopeError / ImproperPolytopeError.
  double support(const Eigen::VectorXd& d) const;

  bool contains_point(const Eigen::VectorXd& x,
                      double tolerance = tol::feasibility) const;
  bool is_empty() const;
  bool is_bounded() const;
  bool is_proper() const { return !is_empty() && is_bounded(); }

  // Exact translate {x + t : x in P}.
  Polytope translated(const Eigen::VectorXd& t) const;

  // Canonical axis-aligned box detection: rows are +-e_i covering every
  // axis exactly once per sign. Returns (lo, hi) when the pattern holds.
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> as_box() const;

  std::string to_text() const;
  static Polytope from_text(const std::string& text);

 private:
  static Eigen::MatrixXd interval_rows() {
    Eigen::MatrixXd m(2, 1);
    m << 1.0, -1.0;
    return m;
  }

  Eigen::MatrixXd h_mat_;
  Eigen::VectorXd h_vec_;
  int dim_;
};

// Vertex representation; rows of `vertices` are points.
struct VPolytope {
  Eigen::MatrixXd vertices;
  int dim() const { return static_cast<int>(vertices.cols()); }
  int count() const { return static_cast<int>(vertices.rows()); }
};

Polytope minkowski_sum(const Polytope& p, const Polytope& q);

// {x : x (+) q subset of p}; emptiness is a signalled value (is_empty()),
// not an error, since over-tightening legitimately empties a set.
Polytope pontryagin_diff(const Polytope& p, const Polytope& q);

// {M x : x in P}; M may be rectangular or rank-deficient.
Polytope linear_map(const Eigen::MatrixXd& m, const Polytope& p);

// support(Q, H_i) <= h_i + tolerance for every facet of P.
bool contains_set(const Polytope& p, const Polytope& q,
                  double tolerance = tol::feasibility);

Polytope remove_redundancy(const Polytope& p);

// {alpha x : x in P} for origin-containing P (h' = alpha h); alpha >= 0.
Polytope scale(const Polytope& p, double alpha);

VPolytope enumerate_vertices(const Polytope& p);

// V -> H conversion. Handles clouds whose affine hull is lower-dimensional
// by emitting the affine-hull equality rows as +- halfspace pairs.
Polytope convex_hull(const VPolytope& v);

// Prune points that are not vertices of the hull (LP filter).
VPolytope hull_vertices(const VPolytope& v);

}  // namespace rsca::geom
