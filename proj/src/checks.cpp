#include "gradreg/checks.hpp"

#include "gradreg/gr_methods.hpp"
#include "gradreg/rng.hpp"
#include "gradreg/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace gradreg {

namespace {

Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, scale);
  }
  return m;
}

Vector random_vector(Rng& rng, Index size, double scale = 1.0) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = rng.normal(0.0, scale);
  return v;
}

double rel_diff(const Vector& a, const Vector& b) {
  const double denom = std::max(a.norm(), b.norm());
  if (denom == 0.0) return 0.0;
  return (a - b).norm() / denom;
}

}  // namespace

CheckResult check_linear_invariance(int trials, std::uint64_t seed) {
  CheckResult out;
  out.trials = trials;
  constexpr double kEpsGrid[] = {1e-3, 1e-2, 0.1, 1.0};
  double worst_fd = 0.0;
  double worst_closed = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    const Index n = 1 + static_cast<Index>(rng.uniform01() * 10.0 - 1e-12) % 10;
    const Index d = 1 + static_cast<Index>(rng.uniform01() * 10.0 - 1e-12) % 10;
    const Matrix x = random_matrix(rng, n, d);
    const Vector y = random_vector(rng, n);
    const Vector theta = random_vector(rng, d);
    const LinearMseObjective obj(Dataset(x, y));

    const Vector db = delta_r_db(obj, theta);
    const Vector closed_form = x.transpose() * x * x.transpose() * (x * theta - y);
    worst_closed = std::max(worst_closed, rel_diff(db, closed_form));
    for (const double eps : kEpsGrid) {
      worst_fd = std::max(worst_fd, rel_diff(delta_r_forward(obj, theta, eps), db));
    }
  }
  out.worst = std::max(worst_fd, worst_closed);
  out.passed = worst_fd <= 1e-6 && worst_closed <= 1e-12;
  std::ostringstream ss;
  ss << "eps-invariance worst rel " << worst_fd << " (tol 1e-6); closed-form worst rel "
     << worst_closed << " (tol 1e-12)";
  out.detail = ss.str();
  return out;
}

CheckResult check_flooding_identity(int cases, std::uint64_t seed) {
  CheckResult out;
  out.trials = cases;
  double worst = 0.0;
  int done = 0;
  for (std::uint64_t attempt = 0; done < cases && attempt < 50ull * cases; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    const int family = static_cast<int>(rng.uniform01() * 3.0) % 3;
    std::unique_ptr<Objective> obj;
    Vector theta;
    if (family == 0) {
      obj = std::make_unique<LinearMseObjective>(Dataset(Matrix::Identity(1, 1), Vector::Zero(1)));
      theta = random_vector(rng, 1);
    } else if (family == 1) {
      const Index d = 10;
      obj = std::make_unique<LinearMseObjective>(
          Dataset(random_matrix(rng, d, d, 0.5), random_vector(rng, d)));
      theta = random_vector(rng, d);
    } else {
      const Index d = 4;
      const Index n = 3;
      obj = std::make_unique<DlnObjective>(
          Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
      theta = random_vector(rng, 2 * d, 0.7);
    }
    const double eta = 0.01 + 0.2 * rng.uniform01();
    const double loss0 = obj->loss(theta);
    const Vector g0 = obj->gradient(theta);
    if (g0.norm() < 1e-12) continue;

    // ascent-then-descent flip: pick b between L(theta) and L(theta + eta g)
    const double loss_up = obj->loss(theta + eta * g0);
    if (loss_up > loss0) {
      const double level = 0.5 * (loss0 + loss_up);
      FloodConfig cfg{level, eta, 2};
      const Vector one = flooding_step(*obj, theta, cfg);
      if (obj->loss(one) > level) {
        const Vector two = flooding_step(*obj, one, cfg);
        const Vector fgr_form = theta - eta * (obj->gradient(theta + eta * g0) - g0);
        worst = std::max(worst, rel_diff(two, fgr_form));
        ++done;
      }
    }

    // descent-then-ascent flip: pick b between L(theta - eta g) and L(theta)
    const double loss_down = obj->loss(theta - eta * g0);
    if (done < cases && loss_down < loss0) {
      const double level = 0.5 * (loss_down + loss0);
      FloodConfig cfg{level, eta, 2};
      const Vector one = flooding_step(*obj, theta, cfg);
      if (obj->loss(one) < level) {
        const Vector two = flooding_step(*obj, one, cfg);
        const Vector bgr_form = theta - eta * (g0 - obj->gradient(theta - eta * g0));
        worst = std::max(worst, rel_diff(two, bgr_form));
        ++done;
      }
    }
  }
  out.trials = done;
  out.worst = worst;
  out.passed = done >= cases && worst <= 1e-12;
  std::ostringstream ss;
  ss << done << " sign-flip configurations, worst rel " << worst << " (tol 1e-12)";
  out.detail = ss.str();
  return out;
}

CheckResult check_sam_identity(int states, std::uint64_t seed) {
  CheckResult out;
  out.trials = states;
  double worst = 0.0;
  for (int state = 0; state < states; ++state) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(state)));
    std::unique_ptr<Objective> obj;
    Vector theta;
    if (state % 2 == 0) {
      const Index n = 6;
      const Index d = 5;
      obj = std::make_unique<LinearMseObjective>(
          Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
      theta = random_vector(rng, d);
    } else {
      const Index d = 6;
      const Index n = 4;
      obj = std::make_unique<DlnObjective>(
          Dataset(random_matrix(rng, n, d), random_vector(rng, n)));
      theta = random_vector(rng, 2 * d, 0.8);
    }
    const double rho = 0.01 + rng.uniform01();
    const double eta = 0.001 + 0.1 * rng.uniform01();

    const Vector sam = sam_step(*obj, theta, SamConfig{rho, false}, eta);
    const Vector gd = gd_step(*obj, theta, GrConfig{GrMethod::forward_fd(rho), rho}, eta);
    for (Index i = 0; i < sam.size(); ++i) {
      const double denom = std::max({std::abs(sam[i]), std::abs(gd[i]), 1e-300});
      worst = std::max(worst, std::abs(sam[i] - gd[i]) / denom);
    }
  }
  out.worst = worst;
  out.passed = worst <= 1e-15;
  std::ostringstream ss;
  ss << states << " random states, worst componentwise rel " << worst << " (tol 1e-15)";
  out.detail = ss.str();
  return out;
}

}  // namespace gradreg
