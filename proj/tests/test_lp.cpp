#include <doctest.h>

#include "rsca/lp.hpp"
#include "test_helpers.hpp"

using namespace rsca;

TEST_CASE("maximize on a box hits the corner") {
  Eigen::MatrixXd a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd b(4);
  b << 2, 1, 3, 1;
  Eigen::VectorXd c(2);
  c << 1, 1;
  lp::Result r = lp::maximize(c, a, b);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.x(0) == doctest::Approx(2.0));
  CHECK(r.x(1) == doctest::Approx(3.0));
}

TEST_CASE("unbounded and infeasible detection") {
  Eigen::MatrixXd a(1, 1);
  a << -1;
  Eigen::VectorXd b(1);
  b << 0;  // x >= 0
  Eigen::VectorXd c(1);
  c << 1;
  CHECK(lp::maximize(c, a, b).status == lp::Status::unbounded);

  Eigen::MatrixXd a2(2, 1);
  a2 << 1, -1;
  Eigen::VectorXd b2(2);
  b2 << -1, -1;  // x <= -1 and x >= 1
  CHECK(lp::maximize(c, a2, b2).status == lp::Status::infeasible);
}

TEST_CASE("support_lp agrees with primal maximize on random systems") {
  testutil::Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next() % 3);
    auto p = testutil::random_polytope(rng, dim, 4);
    Eigen::VectorXd d = rng.direction(dim);
    lp::Result dual = lp::support_lp(d, p.facet_normals(), p.facet_offsets());
    lp::Result primal = lp::maximize(d, p.facet_normals(), p.facet_offsets());
    REQUIRE(dual.status == lp::Status::optimal);
    REQUIRE(primal.status == lp::Status::optimal);
    CHECK(dual.objective ==
          doctest::Approx(primal.objective).epsilon(1e-9));
  }
}

TEST_CASE("support_lp separates empty from unbounded") {
  // empty polytope
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  Eigen::VectorXd b(2);
  b << -1, -1;
  Eigen::VectorXd d(1);
  d << 1;
  CHECK(lp::support_lp(d, a, b).status == lp::Status::infeasible);

  // half-space: unbounded in +x
  Eigen::MatrixXd a2(1, 1);
  a2 << -1;
  Eigen::VectorXd b2(1);
  b2 << 5;
  CHECK(lp::support_lp(d, a2, b2).status == lp::Status::unbounded);
  // but bounded in -x
  Eigen::VectorXd dm(1);
  dm << -1;
  lp::Result r = lp::support_lp(dm, a2, b2);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(5.0));
}

TEST_CASE("halfspace emptiness via Farkas") {
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  Eigen::VectorXd b_ok(2), b_empty(2);
  b_ok << 1, 1;
  b_empty << -1, -1;
  CHECK(!lp::halfspace_system_empty(a, b_ok));
  CHECK(lp::halfspace_system_empty(a, b_empty));
}

TEST_CASE("degenerate duplicate rows do not break the simplex") {
  Eigen::MatrixXd a(5, 2);
  a << 1, 0, 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd b(5);
  b << 1, 1, 1, 1, 1;
  Eigen::VectorXd c(2);
  c << 3, -2;
  lp::Result r = lp::maximize(c, a, b);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(5.0));
}

TEST_CASE("solve_standard basics") {
  // min y1 + y2 s.t. y1 - y2 = 1, y >= 0  -> y = (1, 0)
  Eigen::MatrixXd a(1, 2);
  a << 1, -1;
  Eigen::VectorXd b(1);
  b << 1;
  Eigen::VectorXd c(2);
  c << 1, 1;
  lp::Result r = lp::solve_standard(c, a, b);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(1.0));

  Eigen::VectorXd cneg(2);
  cneg << -1, -1;
  CHECK(lp::solve_standard(cneg, a, b).status == lp::Status::unbounded);

  Eigen::MatrixXd a2(2, 1);
  a2 << 1, 1;
  Eigen::VectorXd b2(2);
  b2 << 1, 2;
  Eigen::VectorXd c2(1);
  c2 << 1;
  CHECK(lp::solve_standard(c2, a2, b2).status == lp::Status::infeasible);
}
