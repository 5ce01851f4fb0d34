#include <doctest.h>

#include <cmath>
#include <numbers>

#include "darkprobe/oscillator.hpp"
#include "darkprobe/rng.hpp"
#include "darkprobe/scatter.hpp"

using namespace darkprobe;

namespace {

std::vector<Eigen::Vector2d> random_points(int n, Rng& rng, double scale = 2.0) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i)
    pts.emplace_back(scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0));
  return pts;
}

}  // namespace

TEST_CASE("interpolator reproduces linear fields inside the hull") {
  // exact up to the gradient-fit regularization bias (~1e-8 relative)
  Rng rng(1);
  const auto pts = random_points(400, rng);
  std::vector<Complex> vals;
  for (const auto& p : pts) vals.emplace_back(0.3 + 1.7 * p.x() - 0.4 * p.y(), 0.2 * p.x());
  const ScatteredInterpolator interp(pts, vals);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Vector2d q(1.6 * (2.0 * rng.uniform() - 1.0), 1.6 * (2.0 * rng.uniform() - 1.0));
    bool outside = false;
    const Complex v = interp.interpolate(q, &outside);
    if (outside) continue;
    const Complex ref(0.3 + 1.7 * q.x() - 0.4 * q.y(), 0.2 * q.x());
    CHECK(std::abs(v - ref) < 1e-6);
  }
}

TEST_CASE("interpolator captures quadratic curvature") {
  Rng rng(2);
  const auto pts = random_points(900, rng);
  std::vector<Complex> vals;
  for (const auto& p : pts) vals.emplace_back(p.x() * p.x() + 2.0 * p.y() * p.y(), 0.0);
  const ScatteredInterpolator interp(pts, vals);
  double worst = 0.0;
  int used = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Vector2d q(1.5 * (2.0 * rng.uniform() - 1.0), 1.5 * (2.0 * rng.uniform() - 1.0));
    bool outside = false;
    const Complex v = interp.interpolate(q, &outside);
    if (outside) continue;
    ++used;
    worst = std::max(worst, std::abs(v - Complex(q.x() * q.x() + 2.0 * q.y() * q.y(), 0.0)));
  }
  CHECK(used > 200);
  CHECK(worst < 0.05);
}

TEST_CASE("queries outside the hull are flagged") {
  Rng rng(3);
  const auto pts = random_points(100, rng, 1.0);
  std::vector<Complex> vals(pts.size(), Complex(1.0, 0.0));
  const ScatteredInterpolator interp(pts, vals);
  bool outside = false;
  const Complex v = interp.interpolate({10.0, 10.0}, &outside);
  CHECK(outside);
  CHECK(v == Complex(0.0, 0.0));
}

TEST_CASE("near-duplicate points are merged") {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (int k = 0; k < 50; ++k) pts.emplace_back(0.5 + 1e-15 * k, 0.5);
  std::vector<Complex> vals(pts.size(), Complex(2.0, 0.0));
  const ScatteredInterpolator interp(pts, vals);
  CHECK(interp.vertex_count() == 5);
  bool outside = false;
  CHECK(std::abs(interp.interpolate({0.4, 0.4}, &outside) - Complex(2.0, 0.0)) < 1e-12);
}

TEST_CASE("degenerate collinear input is rejected") {
  std::vector<Eigen::Vector2d> pts;
  std::vector<Complex> vals;
  for (int i = 0; i < 10; ++i) {
    pts.emplace_back(i, 0.0);
    vals.emplace_back(i, 0.0);
  }
  CHECK_THROWS_AS((void)ScatteredInterpolator(pts, vals), NumericalError);
}

TEST_CASE("nearest-distance queries against brute force") {
  Rng rng(4);
  const auto pts = random_points(300, rng);
  std::vector<Complex> vals(pts.size(), Complex(0, 0));
  const ScatteredInterpolator interp(pts, vals);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Vector2d q(3.0 * (2.0 * rng.uniform() - 1.0), 3.0 * (2.0 * rng.uniform() - 1.0));
    double ref = 1e300;
    for (const auto& p : pts) ref = std::min(ref, (p - q).norm());
    CHECK(interp.nearest_distance(q) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("Delaunay handles structured curve samples at scale") {
  // the production geometry: dense samples along closed curves
  OscParams o;
  o.nu = 1.0;
  o.g = 3.0 / 40.0;
  std::vector<Eigen::Vector2d> pts;
  std::vector<Complex> vals;
  for (int n = 1; n <= 12; ++n)
    for (int i = 1; i <= 400; ++i) {
      const double tau = 2.0 * std::numbers::pi * i / 400.0;
      const Complex xi = xi_curve(o, tau, n);
      pts.emplace_back(xi.real(), xi.imag());
      vals.emplace_back(std::exp(-0.5 * std::norm(xi)), 0.0);
      pts.emplace_back(-xi.real(), -xi.imag());
      vals.emplace_back(std::exp(-0.5 * std::norm(xi)), 0.0);
    }
  pts.emplace_back(0.0, 0.0);
  vals.emplace_back(1.0, 0.0);
  const ScatteredInterpolator interp(pts, vals);

  // vacuum characteristic function recovered over the covered disk
  Rng rng(5);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const double r = 2.0 * rng.uniform();
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    const Eigen::Vector2d q(r * std::cos(a), r * std::sin(a));
    bool outside = false;
    const Complex v = interp.interpolate(q, &outside);
    if (outside) continue;
    worst = std::max(worst, std::abs(v - std::exp(-0.5 * q.squaredNorm())));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("sub-epsilon value noise is not amplified by the gradient fit") {
  // near-coincident samples from crossing curves once drove unbounded 1/d^2
  // weights; 1e-12 noise then blew up to O(1) patch values
  OscParams o;
  o.nu = 1.0;
  o.g = 3.0 / 40.0;
  std::vector<Eigen::Vector2d> pts;
  std::vector<Complex> vals;
  for (int n = 1; n <= 20; ++n)
    for (int i = 1; i <= 480; ++i) {
      const double tau = 2.0 * std::numbers::pi * i / 480.0;
      const Complex xi = xi_curve(o, tau, n);
      const Complex chi = std::exp(-0.5 * std::norm(xi));
      pts.emplace_back(xi.real(), xi.imag());
      vals.push_back(chi);
      pts.emplace_back(-xi.real(), -xi.imag());
      vals.push_back(chi);
    }
  pts.emplace_back(0.0, 0.0);
  vals.emplace_back(1.0, 0.0);

  Rng rng(9);
  std::vector<Complex> noisy = vals;
  for (auto& v : noisy)
    v += Complex(1e-12 * (rng.uniform() - 0.5), 1e-12 * (rng.uniform() - 0.5));

  const ScatteredInterpolator clean(pts, vals);
  const ScatteredInterpolator dirty(pts, noisy);
  double worst = 0.0;
  for (int i = 0; i <= 80; ++i)
    for (int j = 0; j <= 80; ++j) {
      const Eigen::Vector2d q(-6.0 + 12.0 * i / 80.0, -6.0 + 12.0 * j / 80.0);
      bool o1 = false, o2 = false;
      const Complex a = clean.interpolate(q, &o1);
      const Complex b = dirty.interpolate(q, &o2);
      if (!o1 && !o2) worst = std::max(worst, std::abs(a - b));
    }
  CHECK(worst < 1e-8);
}
