#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "sae/area_graph.hpp"
#include "sae/errors.hpp"
#include "sae/icar.hpp"
#include "sae/spatial_stats.hpp"
#include "test_support.hpp"

using namespace sae;

namespace {

AreaGraph path3() { return build_area_graph(3, {{0, 1}, {1, 2}}); }
AreaGraph triangle() { return build_area_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

// Path of 3 disjoint from a triangle: two components, n = 6.
AreaGraph two_components() {
  return build_area_graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {3, 5}});
}

void check_icar_invariants(const AreaGraph& g, const IcarOperator& op) {
  const auto& q = op.q_scaled;
  const auto& v = op.q_ginv;
  // Intrinsic precision: rows sum to zero.
  CHECK((q.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-10);
  // Moore-Penrose identities.
  CHECK(((q * v * q) - q).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(((v * q * v) - v).cwiseAbs().maxCoeff() < 1e-8);
  // Unit generalized variance.
  double log_sum = 0.0;
  for (int i = 0; i < g.n; ++i) log_sum += std::log(v(i, i));
  CHECK(std::fabs(std::exp(log_sum / g.n) - 1.0) < 1e-10);
  // Structural rank.
  CHECK(op.rank == g.n - g.n_components);
  int positive = 0;
  for (Eigen::Index i = 0; i < op.eigenvalues.size(); ++i) {
    if (op.eigenvalues[i] > 1e-9) ++positive;
  }
  CHECK(positive == op.rank);
}

}  // namespace

TEST_CASE("graph construction canonicalizes edges and labels components") {
  const auto g = build_area_graph(4, {{2, 0}, {0, 2}, {1, 0}, {0, 1}, {2, 3}});
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {2, 3}});
  CHECK(g.degree == std::vector<int>{2, 1, 2, 1});
  CHECK(g.neighbors[0] == std::vector<int>{1, 2});
  CHECK(g.n_components == 1);

  const auto two = two_components();
  CHECK(two.n_components == 2);
  CHECK(two.component == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("graph construction from area ids resolves and validates") {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto g = build_area_graph(ids, {{"b", "a"}, {"b", "c"}});
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

  CHECK_THROWS_AS((void)build_area_graph(ids, {{"a", "zz"}}), DataError);
  CHECK_THROWS_AS((void)build_area_graph(ids, {{"a", "a"}}), DataError);
  CHECK_THROWS_AS((void)build_area_graph({"a", "a"}, {}), DataError);
  CHECK_THROWS_AS((void)build_area_graph(0, {}), DataError);
  CHECK_THROWS_AS((void)build_area_graph(2, {{0, 2}}), DataError);
}

TEST_CASE("unscaled ICAR precision is degree minus adjacency") {
  const Matrix q = icar_precision_unscaled(path3());
  Matrix expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((q - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generalized inverse reproduces hand-computed spectra") {
  // Triangle: Q0 = 3I - J has pseudo-inverse (I - J/3)/3.
  const Matrix q = icar_precision_unscaled(triangle());
  const Matrix v = generalized_inverse(q);
  Matrix expected = (Matrix::Identity(3, 3) - Matrix::Constant(3, 3, 1.0 / 3.0)) / 3.0;
  CHECK((v - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Rank-one PSD matrix.
  Matrix ones(2, 2);
  ones << 1, 1, 1, 1;
  const Matrix vi = generalized_inverse(ones);
  CHECK((vi - Matrix::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generalized inverse rejects asymmetric and indefinite input") {
  Matrix m(2, 2);
  m << 1, 0.5, 0, 1;
  CHECK_THROWS_AS((void)generalized_inverse(m), NumericalError);
  Matrix ind(2, 2);
  ind << 0, 1, 1, 0;  // eigenvalues -1, +1
  try {
    (void)generalized_inverse(ind);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.code() == errc::negative_eigenvalue);
  }
}

TEST_CASE("ICAR scaling matches closed forms on small graphs") {
  // Path of 3: marginal variances (5/9, 2/9, 5/9), geometric mean 50^{1/3}/9.
  const auto op = scale_icar(path3());
  CHECK(std::fabs(op.scale - std::cbrt(50.0) / 9.0) < 1e-12);
  CHECK(std::fabs(op.q_ginv(1, 1) - (2.0 / 9.0) / op.scale) < 1e-12);

  // Triangle: marginal variances all 2/9, so the scale equals 2/9 and the
  // scaled marginal variances are exactly one.
  const auto tri = scale_icar(triangle());
  CHECK(std::fabs(tri.scale - 2.0 / 9.0) < 1e-12);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(tri.q_ginv(i, i) - 1.0) < 1e-12);
}

TEST_CASE("ICAR invariants hold across graph shapes") {
  const auto p3 = path3();
  check_icar_invariants(p3, scale_icar(p3));
  const auto tri = triangle();
  check_icar_invariants(tri, scale_icar(tri));
  const auto two = two_components();
  check_icar_invariants(two, scale_icar(two));
  const auto lat = build_area_graph(100, test::lattice_edges(10, 10));
  check_icar_invariants(lat, scale_icar(lat));
}

TEST_CASE("ICAR scaling rejects edgeless graphs and isolated areas") {
  const auto edgeless = build_area_graph(2, {});
  try {
    (void)scale_icar(edgeless);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.code() == errc::no_edges);
  }
  const auto isolated = build_area_graph(3, {{0, 1}});
  try {
    (void)scale_icar(isolated);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.code() == errc::zero_marginal_variance);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("Geary's C reproduces hand-computed values") {
  Vector x(3);
  x << 1.0, 2.0, 3.0;
  // Path: numerator 2, W = 4, denominator 2 -> C = 2*2/(2*4*2) = 0.25.
  CHECK(std::fabs(gearys_c(x, path3()) - 0.25) < 1e-12);
  // Triangle: numerator 6, W = 6, denominator 2 -> C = 2*6/(2*6*2) = 0.5.
  CHECK(std::fabs(gearys_c(x, triangle()) - 0.5) < 1e-12);
}

TEST_CASE("Geary's C is invariant to affine rescaling of the values") {
  const auto g = build_area_graph(25, test::lattice_edges(5, 5));
  RngStream rng(12);
  Vector x(25);
  for (int i = 0; i < 25; ++i) x[i] = rng.normal();
  const double c0 = gearys_c(x, g);
  const Vector y = 2.5 * x.array() - 7.0;
  CHECK(std::fabs(gearys_c(y, g) - c0) < 1e-12);
}

TEST_CASE("Geary's C rejects degenerate input") {
  Vector c3 = Vector::Constant(3, 1.0);
  CHECK_THROWS_AS((void)gearys_c(c3, path3()), DataError);
  Vector x2(2);
  x2 << 0.0, 1.0;
  CHECK_THROWS_AS((void)gearys_c(x2, build_area_graph(2, {})), DataError);
  Vector x4(4);
  x4 << 0, 1, 2, 3;
  CHECK_THROWS_AS((void)gearys_c(x4, path3()), UsageError);
}

TEST_CASE("permutation test flags clustered values and is reproducible") {
  const auto g = build_area_graph(100, test::lattice_edges(10, 10));
  Vector smooth(100);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) smooth[r * 10 + c] = static_cast<double>(c);
  }
  RngStream rng_a(7), rng_b(7);
  const double p_a = gearys_c_mc_test(smooth, g, 999, rng_a);
  const double p_b = gearys_c_mc_test(smooth, g, 999, rng_b);
  CHECK(p_a == p_b);
  CHECK(p_a < 0.05);
  CHECK(p_a >= 1.0 / 1000.0);

  RngStream rng_c(8);
  CHECK_THROWS_AS((void)gearys_c_mc_test(smooth, g, 0, rng_c), UsageError);
}
