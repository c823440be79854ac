#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradreg/objective.hpp"
#include "test_util.hpp"

using namespace gradreg;
using namespace gradreg::testutil;

namespace {

Dataset toy2x2() {
  Matrix x(2, 2);
  x << 1, 0, 0, 2;
  Vector y(2);
  y << 1, 1;
  return Dataset(x, y);
}

DlnObjective dln_1x1(double x0, double y0) {
  Matrix x(1, 1);
  x << x0;
  Vector y(1);
  y << y0;
  return DlnObjective(Dataset(x, y));
}

Vector stacked(std::initializer_list<double> plus, std::initializer_list<double> minus) {
  Vector w(static_cast<Index>(plus.size() + minus.size()));
  Index i = 0;
  for (double v : plus) w[i++] = v;
  for (double v : minus) w[i++] = v;
  return w;
}

}  // namespace

TEST_CASE("dataset validation") {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  CHECK_THROWS_AS(Dataset(x, Vector::Zero(3)), std::invalid_argument);
  Vector bad(2);
  bad << 1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(x, bad), std::invalid_argument);
}

TEST_CASE("linear gradient hand values") {
  const LinearMseObjective obj(toy2x2());
  Vector theta = Vector::Zero(2);
  Vector g = obj.gradient(theta);
  CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(-2.0).epsilon(1e-14));

  // residual zero
  theta << 1.0, 0.5;
  CHECK(obj.gradient(theta).norm() == 0.0);

  // identity data
  Matrix x1(1, 1);
  x1 << 1;
  const LinearMseObjective tiny(Dataset(x1, Vector::Zero(1)));
  Vector t3(1);
  t3 << 3.0;
  CHECK(tiny.gradient(t3)[0] == doctest::Approx(3.0));

  CHECK_THROWS_AS(obj.gradient(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("dln loss hand values") {
  // beta = 0 at symmetric weights: loss = y^2 / 4
  const DlnObjective obj = dln_1x1(1.0, 2.0);
  for (double a : {0.3, 1.0, -2.0}) {
    CHECK(obj.loss(stacked({a}, {a})) == doctest::Approx(1.0).epsilon(1e-14));
  }

  const DlnObjective unit = dln_1x1(1.0, 1.0);
  CHECK(unit.loss(stacked({1.0}, {0.0})) == 0.0);          // interpolation
  CHECK(unit.loss(stacked({1.0}, {1.0})) == doctest::Approx(0.25).epsilon(1e-14));

  // brute-force oracle on a random instance
  Rng rng(11);
  const Index n = 5, d = 3;
  const Dataset data(random_matrix(rng, n, d), random_vector(rng, n));
  const DlnObjective rnd(data);
  const Vector w = random_vector(rng, 2 * d);
  double acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    double dot = 0.0;
    for (Index i = 0; i < d; ++i) {
      dot += (w[i] * w[i] - w[d + i] * w[d + i]) * data.X(j, i);
    }
    acc += (dot - data.y[j]) * (dot - data.y[j]);
  }
  CHECK(rnd.loss(w) == doctest::Approx(acc / (4.0 * n)).epsilon(1e-12));

  CHECK_THROWS_AS(rnd.loss(Vector::Zero(2 * d + 1)), std::invalid_argument);
}

TEST_CASE("dln gradient hand values and sign symmetry") {
  const DlnObjective obj = dln_1x1(1.0, 1.0);
  CHECK(obj.gradient(stacked({1.0}, {0.0})).norm() == 0.0);

  const Vector g = obj.gradient(stacked({1.0}, {1.0}));
  CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(12);
  const Index n = 4, d = 6;
  const DlnObjective rnd(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
  Vector sym(2 * d);
  sym.head(d) = random_vector(rng, d);
  sym.tail(d) = sym.head(d);
  const Vector gs = rnd.gradient(sym);
  CHECK((gs.head(d) + gs.tail(d)).norm() == 0.0);
}

TEST_CASE("dln hvp hand values") {
  const DlnObjective obj = dln_1x1(1.0, 1.0);
  const Vector w = stacked({1.0}, {0.0});
  const Vector hv = obj.hvp(w, stacked({1.0}, {0.0}));
  CHECK(hv[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(hv[1] == doctest::Approx(0.0));

  CHECK(obj.hvp(w, Vector::Zero(2)).norm() == 0.0);

  // at interpolation the diag(Xt^T r) term vanishes
  Rng rng(13);
  const Index n = 3, d = 5;
  const Matrix x = random_matrix(rng, n, d);
  Vector w0 = random_vector(rng, 2 * d);
  const Vector y = x * beta_from_w(w0);  // w0 interpolates by construction
  const DlnObjective interp(Dataset(x, y));
  const Vector v = random_vector(rng, 2 * d);
  const Matrix h = interp.dense_hessian(w0);
  CHECK(rel_diff(interp.hvp(w0, v), h * v) < 1e-12);
  // dense Hessian diagonal has no residual contribution here
  Matrix xt(n, 2 * d);
  xt.leftCols(d) = x;
  xt.rightCols(d) = -x;
  const Matrix h_interp =
      2.0 / n * w0.asDiagonal() * (xt.transpose() * xt) * w0.asDiagonal();
  CHECK((h - h_interp).norm() < 1e-12 * h.norm());
}

TEST_CASE("dense hessian guarded by dimension") {
  Rng rng(14);
  const Index d = DlnObjective::kDenseHessianMaxDim + 1;
  const DlnObjective big(Dataset(random_matrix(rng, 2, d), random_vector(rng, 2)));
  CHECK_THROWS_AS(big.dense_hessian(Vector::Zero(2 * d)), std::invalid_argument);
}

TEST_CASE("beta_from_w") {
  CHECK(beta_from_w(stacked({0.7, -0.2}, {0.7, -0.2})).norm() == 0.0);
  CHECK(beta_from_w(stacked({2.0}, {1.0}))[0] == doctest::Approx(3.0));
  const Vector b = beta_from_w(stacked({0.0, 1.0}, {1.0, 0.0}));
  CHECK(b[0] == doctest::Approx(-1.0));
  CHECK(b[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(beta_from_w(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("gradient matches central finite difference") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(100, seed));
    const Index d = 2 + static_cast<Index>(rng.uniform01() * 18.0) % 19;
    const Index n = 1 + static_cast<Index>(rng.uniform01() * 10.0) % 10;

    const LinearMseObjective lin(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
    const Vector theta = random_vector(rng, d);
    const Vector g = lin.gradient(theta);
    const Vector fd = numeric_gradient(lin, theta);
    for (Index i = 0; i < d; ++i) {
      CHECK(std::abs(fd[i] - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }

    const DlnObjective dln(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
    const Vector w = random_vector(rng, 2 * d);
    const Vector gd = dln.gradient(w);
    const Vector fdd = numeric_gradient(dln, w);
    for (Index i = 0; i < 2 * d; ++i) {
      CHECK(std::abs(fdd[i] - gd[i]) <= 1e-5 * std::max(1.0, std::abs(gd[i])));
    }
  }
}

TEST_CASE("hvp matches finite difference of the gradient") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(200, seed));
    const Index d = 2 + static_cast<Index>(rng.uniform01() * 10.0) % 11;
    const Index n = 1 + static_cast<Index>(rng.uniform01() * 8.0) % 8;
    const DlnObjective dln(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
    const Vector w = random_vector(rng, 2 * d);
    const Vector v = random_vector(rng, 2 * d);
    const Vector hv = dln.hvp(w, v);
    const Vector fd = numeric_hvp(dln, w, v);
    CHECK(rel_diff(hv, fd) < 1e-4);
  }
}

TEST_CASE("hvp linearity and symmetry") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(300, seed));
    const Index d = 3 + static_cast<Index>(rng.uniform01() * 8.0) % 9;
    const Index n = 2 + static_cast<Index>(rng.uniform01() * 6.0) % 6;
    const DlnObjective dln(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
    const Vector w = random_vector(rng, 2 * d);
    const Vector v1 = random_vector(rng, 2 * d);
    const Vector v2 = random_vector(rng, 2 * d);
    const double a = rng.normal(0.0, 2.0);
    const double b = rng.normal(0.0, 2.0);

    const Vector lhs = dln.hvp(w, a * v1 + b * v2);
    const Vector rhs = a * dln.hvp(w, v1) + b * dln.hvp(w, v2);
    CHECK(rel_diff(lhs, rhs) < 1e-12);

    const double s1 = v1.dot(dln.hvp(w, v2));
    const double s2 = v2.dot(dln.hvp(w, v1));
    CHECK(std::abs(s1 - s2) <= 1e-10 * std::max(1.0, std::max(std::abs(s1), std::abs(s2))));
  }
}
