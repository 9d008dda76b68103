#include <random>

#include "doctest.h"
#include "nilforms/exterior.hpp"

using namespace nilforms;

namespace {

ExtForm random_form(int m, int p, std::mt19937& rng) {
  std::normal_distribution<double> g;
  ExtForm a(m, p);
  for (int i = 0; i < a.coeffs.size(); ++i) a.coeffs[i] = g(rng);
  return a;
}

InnerProduct random_metric(int m, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = 0.4 * g(rng);
  return InnerProduct(Eigen::MatrixXd::Identity(m, m) + A * A.transpose());
}

}  // namespace

TEST_CASE("multi-index bookkeeping") {
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(4, 5) == 0);

  const auto& idx = multi_indices(4, 2);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0] == MultiIndex{1, 2});
  CHECK(idx[5] == MultiIndex{3, 4});
  for (std::size_t i = 0; i < idx.size(); ++i)
    CHECK(multi_index_rank(4, idx[i]) == static_cast<int>(i));

  MultiIndex out;
  CHECK(merge_sign({1, 3}, {2}, out) == -1);
  CHECK(out == MultiIndex{1, 2, 3});
  CHECK(merge_sign({1, 2}, {2, 3}, out) == 0);
  CHECK(merge_sign({}, {1}, out) == 1);
}

TEST_CASE("wedge algebra") {
  int m = 5;
  std::mt19937 rng(11);

  SUBCASE("basis products carry the permutation sign") {
    ExtForm e13 = wedge(ExtForm::basis(m, {1}), ExtForm::basis(m, {3}));
    CHECK(e13.coeffs[multi_index_rank(m, {1, 3})] == 1.0);
    ExtForm e31 = wedge(ExtForm::basis(m, {3}), ExtForm::basis(m, {1}));
    CHECK(e31.coeffs[multi_index_rank(m, {1, 3})] == -1.0);
    CHECK(wedge(ExtForm::basis(m, {2}), ExtForm::basis(m, {2})).is_zero());
  }

  SUBCASE("graded anticommutativity and associativity") {
    for (int trial = 0; trial < 20; ++trial) {
      int p = trial % 3, q = (trial / 3) % 3, r = 1;
      ExtForm a = random_form(m, p, rng), b = random_form(m, q, rng), c = random_form(m, r, rng);
      double sgn = (p * q % 2 == 0) ? 1.0 : -1.0;
      CHECK((wedge(a, b) - wedge(b, a) * sgn).norm_inf() < 1e-13);
      CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).norm_inf() < 1e-13);
    }
  }

  SUBCASE("degree overflow is the zero form") {
    ExtForm top = random_form(m, m, rng);
    CHECK(wedge(top, random_form(m, 1, rng)).is_zero());
  }
}

TEST_CASE("interior product is the metric adjoint of wedging with the flat") {
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  for (int m : {3, 4, 5}) {
    InnerProduct G = random_metric(m, rng);
    for (int p = 1; p <= m; ++p) {
      Eigen::VectorXd v(m);
      for (int i = 0; i < m; ++i) v[i] = g(rng);
      ExtForm a = random_form(m, p, rng), b = random_form(m, p - 1, rng);
      // v flat has coefficients G v in the dual basis.
      ExtForm vflat(m, 1);
      vflat.coeffs = G.gram() * v;
      double lhs = form_inner(interior(v, a), b, G);
      double rhs = form_inner(a, wedge(vflat, b), G);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
  }
}

TEST_CASE("interior product is an antiderivation") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  int m = 4;
  for (int trial = 0; trial < 10; ++trial) {
    int p = 1 + trial % 2;
    ExtForm a = random_form(m, p, rng), b = random_form(m, 2, rng);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = g(rng);
    double sgn = (p % 2 == 0) ? 1.0 : -1.0;
    ExtForm lhs = interior(v, wedge(a, b));
    ExtForm rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b)) * sgn;
    CHECK((lhs - rhs).norm_inf() < 1e-13);
  }
}

TEST_CASE("hodge star, orthonormal T^3 table") {
  InnerProduct G(Eigen::MatrixXd::Identity(3, 3));
  auto star = [&](const MultiIndex& i) { return hodge_star(ExtForm::basis(3, i), G); };
  CHECK((star({1}) - ExtForm::basis(3, {2, 3})).norm_inf() == 0.0);
  CHECK((star({2}) - ExtForm::basis(3, {1, 3}) * -1.0).norm_inf() == 0.0);
  CHECK((star({3}) - ExtForm::basis(3, {1, 2})).norm_inf() == 0.0);
  CHECK((star({1, 2}) - ExtForm::basis(3, {3})).norm_inf() == 0.0);
  CHECK(star({})  // star of 1 is the volume form
            .coeffs[0] == 1.0);
}

TEST_CASE("hodge star properties under arbitrary metrics") {
  std::mt19937 rng(37);
  for (int m : {2, 3, 4, 5}) {
    InnerProduct G = random_metric(m, rng);
    for (int p = 0; p <= m; ++p) {
      ExtForm a = random_form(m, p, rng), b = random_form(m, p, rng);

      // a ^ *b = <a,b> vol
      ExtForm vol = hodge_star(ExtForm::basis(m, {}), G);
      ExtForm lhs = wedge(a, hodge_star(b, G));
      CHECK(lhs.coeffs[0] ==
            doctest::Approx(form_inner(a, b, G) * vol.coeffs[0]).epsilon(1e-11));

      // ** = (-1)^{p(m-p)}
      double sgn = (p * (m - p) % 2 == 0) ? 1.0 : -1.0;
      ExtForm ss = hodge_star(hodge_star(a, G), G);
      CHECK((ss - a * sgn).norm_inf() < 1e-11 * (1.0 + a.norm_inf()));

      // star is an isometry
      CHECK(form_inner(hodge_star(a, G), hodge_star(a, G), G) ==
            doctest::Approx(form_inner(a, a, G)).epsilon(1e-11));
    }
  }
}

TEST_CASE("form inner product against the determinant-minor oracle") {
  std::mt19937 rng(41);
  int m = 4, p = 2;
  InnerProduct G = random_metric(m, rng);
  const auto& idx = multi_indices(m, p);
  for (std::size_t u = 0; u < idx.size(); ++u)
    for (std::size_t v = 0; v < idx.size(); ++v) {
      Eigen::MatrixXd minor(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          minor(i, j) = G.cogram()(idx[u][i] - 1, idx[v][j] - 1);
      double want = minor.determinant();
      double got = form_inner(ExtForm::basis(m, idx[u]), ExtForm::basis(m, idx[v]), G);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("InnerProduct rejects bad grams") {
  Eigen::MatrixXd notsym(2, 2);
  notsym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS((void)InnerProduct(notsym), std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS((void)InnerProduct(indef), std::invalid_argument);
  CHECK_THROWS_AS(InnerProduct(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}
