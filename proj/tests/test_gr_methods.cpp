#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradreg/gr_methods.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace gradreg;
using namespace gradreg::testutil;

namespace {

LinearMseObjective toy_linear() {
  Matrix x(2, 2);
  x << 1, 0, 0, 2;
  Vector y(2);
  y << 1, 1;
  return LinearMseObjective(Dataset(x, y));
}

DlnObjective tiny_dln(std::uint64_t seed = 42, Index n = 3, Index d = 4) {
  Rng rng(seed);
  return DlnObjective(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
}

}  // namespace

TEST_CASE("GrMethod construction and signed epsilon") {
  CHECK(GrMethod::forward_fd(0.1).signed_epsilon() == 0.1);
  CHECK(GrMethod::backward_fd(0.1).signed_epsilon() == -0.1);
  CHECK(GrMethod::none().signed_epsilon() == 0.0);
  CHECK(GrMethod::double_backprop().signed_epsilon() == 0.0);
  CHECK_THROWS_AS(GrMethod::forward_fd(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GrMethod::backward_fd(-0.1), std::invalid_argument);
  CHECK_THROWS_AS((GrConfig{GrMethod::none(), -1.0}.validate()), std::invalid_argument);
}

TEST_CASE("forward FD on a quadratic is eps-independent") {
  const LinearMseObjective obj = toy_linear();
  const Vector theta = Vector::Zero(2);
  Vector expected(2);
  expected << -1.0, -8.0;  // X^T X X^T (X theta - y) by hand
  for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
    const Vector dr = delta_r_forward(obj, theta, eps);
    CHECK(rel_diff(dr, expected) < 1e-9);
  }
  CHECK_THROWS_AS(delta_r_forward(obj, theta, 0.0), std::invalid_argument);

  // zero gradient -> zero regularizer gradient
  Vector minimizer(2);
  minimizer << 1.0, 0.5;
  CHECK(delta_r_forward(obj, minimizer, 0.1).norm() == 0.0);
}

TEST_CASE("forward FD first-order error law on DLN") {
  const DlnObjective obj = tiny_dln();
  Rng rng(7);
  const Vector w = random_vector(rng, obj.dim());
  const Vector db = delta_r_db(obj, w);
  const double err1 = (delta_r_forward(obj, w, 1e-4) - db).norm();
  const double err2 = (delta_r_forward(obj, w, 5e-5) - db).norm();
  const double ratio = err1 / err2;
  CHECK(ratio > 2.0 / 1.5);
  CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("backward FD is the reflected forward kernel, bitwise") {
  const DlnObjective obj = tiny_dln(43);
  Rng rng(8);
  const Vector w = random_vector(rng, obj.dim());
  for (double eps : {1e-4, 1e-2, 0.3}) {
    const Vector back = delta_r_backward(obj, w, eps);
    const Vector fwd = delta_r_forward(obj, w, -eps);
    for (Index i = 0; i < w.size(); ++i) {
      CHECK(back[i] == fwd[i]);
    }
  }
  CHECK_THROWS_AS(delta_r_backward(obj, w, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_r_backward(obj, w, -0.1), std::invalid_argument);

  const LinearMseObjective lin = toy_linear();
  Vector expected(2);
  expected << -1.0, -8.0;
  CHECK(rel_diff(delta_r_backward(lin, Vector::Zero(2), 0.1), expected) < 1e-9);
  Vector minimizer(2);
  minimizer << 1.0, 0.5;
  CHECK(delta_r_backward(lin, minimizer, 0.1).norm() == 0.0);
}

TEST_CASE("double backprop route") {
  const LinearMseObjective lin = toy_linear();
  Vector expected(2);
  expected << -1.0, -8.0;
  CHECK(rel_diff(delta_r_db(lin, Vector::Zero(2)), expected) < 1e-12);
  Vector minimizer(2);
  minimizer << 1.0, 0.5;
  CHECK(delta_r_db(lin, minimizer).norm() == 0.0);

  const DlnObjective dln = tiny_dln(44);
  Rng rng(9);
  const Vector w = random_vector(rng, dln.dim());
  CHECK(rel_diff(delta_r_forward(dln, w, 1e-6), delta_r_db(dln, w)) < 1e-4);
}

TEST_CASE("regularized gradient composition") {
  const LinearMseObjective lin = toy_linear();
  const Vector theta = Vector::Zero(2);

  const Vector plain = regularized_gradient(lin, theta, GrConfig{GrMethod::forward_fd(0.1), 0.0});
  const Vector g = lin.gradient(theta);
  for (Index i = 0; i < 2; ++i) CHECK(plain[i] == g[i]);

  Vector expected(2);
  expected << -1.1, -2.8;
  for (const GrMethod& m : {GrMethod::forward_fd(0.05), GrMethod::backward_fd(0.05),
                            GrMethod::double_backprop()}) {
    CHECK(rel_diff(regularized_gradient(lin, theta, GrConfig{m, 0.1}), expected) < 1e-12);
  }

  // gamma = eps turns F-GR into the pure ascent-point gradient
  const DlnObjective dln = tiny_dln(45);
  Rng rng(10);
  const Vector w = random_vector(rng, dln.dim());
  const double rho = 0.07;
  const Vector fused = regularized_gradient(dln, w, GrConfig{GrMethod::forward_fd(rho), rho});
  const Vector ascent_grad = dln.gradient(w + rho * dln.gradient(w));
  for (Index i = 0; i < w.size(); ++i) CHECK(fused[i] == ascent_grad[i]);
}

TEST_CASE("average-Hessian quadrature") {
  const LinearMseObjective lin = toy_linear();
  const Vector theta = Vector::Zero(2);
  const Vector hdL = delta_r_db(lin, theta);
  for (int k : {1, 7, 64}) {
    CHECK(rel_diff(avg_hessian_quadrature(lin, theta, 0.3, k), hdL) < 1e-13);
  }
  CHECK_THROWS_AS(avg_hessian_quadrature(lin, theta, 0.1, 0), std::invalid_argument);

  const DlnObjective dln = tiny_dln(46);
  Rng rng(11);
  const Vector w = random_vector(rng, dln.dim(), 0.8);
  CHECK(rel_diff(avg_hessian_quadrature(dln, w, 1e-4, 64), delta_r_forward(dln, w, 1e-4)) < 1e-6);
  CHECK(rel_diff(avg_hessian_quadrature(dln, w, 1e-8, 1), delta_r_db(dln, w)) < 1e-6);
}

TEST_CASE("eps-invariance property across random linear instances") {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(500, trial));
    const Index n = 1 + static_cast<Index>(rng.uniform01() * 10.0) % 10;
    const Index d = 1 + static_cast<Index>(rng.uniform01() * 10.0) % 10;
    const LinearMseObjective obj(Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
    const Vector theta = random_vector(rng, d);
    const Vector db = delta_r_db(obj, theta);
    for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
      worst = std::max(worst, rel_diff(delta_r_forward(obj, theta, eps), db));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("mean-value identity against quadrature oracle") {
  const DlnObjective dln = tiny_dln(47, 4, 6);
  Rng rng(12);
  const Vector w = random_vector(rng, dln.dim(), 0.7);
  for (double eps : {1e-3, 1e-2, 0.1}) {
    const Vector fd = delta_r_forward(dln, w, eps);
    const Vector quad = avg_hessian_quadrature(dln, w, eps, 256);
    CHECK((fd - quad).norm() / fd.norm() <= 1e-5);
  }
}

TEST_CASE("first-order convergence slope on log-log fit") {
  const DlnObjective dln = tiny_dln(48, 4, 5);
  Rng rng(13);
  const Vector w = random_vector(rng, dln.dim(), 0.8);
  const Vector db = delta_r_db(dln, w);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (double eps = 1e-6; eps <= 1.0001e-2; eps *= 10.0) {
    const double err = (delta_r_forward(dln, w, eps) - db).norm();
    const double lx = std::log(eps);
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}
