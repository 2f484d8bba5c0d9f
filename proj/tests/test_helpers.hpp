#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rsca/polytope.hpp"

namespace testutil {

// splitmix64; fixed seeds keep every property test reproducible
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    s += 0x9E3779B97f4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Eigen::VectorXd direction(int dim) {
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = uniform(-1.0, 1.0);
    if (d.norm() < 1e-6) d(0) = 1.0;
    return d / d.norm();
  }
};

// Proper polytope containing the origin: a random box plus random cuts with
// positive offsets.
inline rsca::geom::Polytope random_polytope(Rng& rng, int dim, int extra_cuts) {
  Eigen::VectorXd lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo(i) = -rng.uniform(0.5, 1.5);
    hi(i) = rng.uniform(0.5, 1.5);
  }
  const int m = 2 * dim + extra_cuts;
  Eigen::MatrixXd h_mat(m, dim);
  Eigen::VectorXd h_vec(m);
  h_mat.topRows(dim) = Eigen::MatrixXd::Identity(dim, dim);
  h_mat.block(dim, 0, dim, dim) = -Eigen::MatrixXd::Identity(dim, dim);
  h_vec.head(dim) = hi;
  h_vec.segment(dim, dim) = -lo;
  for (int i = 0; i < extra_cuts; ++i) {
    Eigen::VectorXd n = rng.direction(dim);
    h_mat.row(2 * dim + i) = n.transpose();
    h_vec(2 * dim + i) = rng.uniform(0.3, 1.2);
  }
  return rsca::geom::Polytope(h_mat, h_vec);
}

inline Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace testutil
