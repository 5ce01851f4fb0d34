#include <doctest.h>

#include <cmath>

#include "darkprobe/rng.hpp"
#include "darkprobe/twospin.hpp"

using namespace darkprobe;

namespace {

TwoSpinParams weak_fixture(double c = 0.01) {
  TwoSpinParams p;
  p.omega0 = 1.0;
  p.inter_ax = c;
  p.a_z1 = c;
  p.a_z2 = -c;
  p.a_x1 = c;
  p.a_x2 = c;
  return p;
}

Matrix bell_state() {
  Matrix rho = Matrix::Zero(4, 4);
  rho(1, 1) = rho(1, 2) = rho(2, 1) = rho(2, 2) = 0.5;
  return rho;
}

Matrix random_subspace_state(Rng& rng) {
  Eigen::Matrix2cd g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::Matrix2cd w = g * g.adjoint();
  w /= w.trace().real();
  Matrix rho = Matrix::Zero(4, 4);
  rho.block<2, 2>(1, 1) = w;
  return rho;
}

// direct 2x2 pseudo-spin simulation: V0 = (Ax/2) sx, V1 = V0 + (Az/2) sz
double pseudo_direct_sy(const TwoSpinParams& p, const PulseSequence& seq, const Matrix& rho2) {
  const Matrix v0 = 0.5 * p.inter_ax * pauli_x();
  const Matrix v1 = v0 + 0.5 * p.big_az() * pauli_z();
  const auto [u0, u1] = sequence_propagators(v0, v1, seq);
  const Matrix sub = rho2.block(1, 1, 2, 2);
  return (u0.adjoint() * u1 * sub).trace().imag();
}

}  // namespace

TEST_CASE("pseudo-spin fields realize the documented substitutions") {
  const TwoSpinParams p = weak_fixture();
  const SpinFields f = pseudo_spin_fields(p);
  CHECK(f.omega0 == p.inter_ax);
  CHECK(f.omega1 == doctest::Approx(p.big_a()).epsilon(1e-14));
  CHECK(f.v_x == doctest::Approx(p.big_az() / p.big_a()).epsilon(1e-14));
  CHECK(f.v_z == doctest::Approx(p.inter_ax / p.big_a()).epsilon(1e-14));
}

TEST_CASE("derived pseudo fields for the a, -a, a coupling pattern") {
  TwoSpinParams p;
  p.omega0 = 1.0;
  const double a = 0.02;
  p.a_z1 = a;
  p.a_z2 = -a;
  p.inter_ax = a;
  // A_z = 2a, A = a sqrt(5): v_x = 2/sqrt(5), v_z = 1/sqrt(5)
  const SpinFields f = pseudo_spin_fields(p);
  CHECK(f.v_x == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(f.v_z == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("symmetric a_z couplings are invisible to the scheme") {
  TwoSpinParams p = weak_fixture();
  p.a_z2 = p.a_z1;  // A_z = 0: V0 and V1 commute on the subspace
  CHECK(p.big_az() == 0.0);
  const auto w = pseudo_weighted_axis(p, PulseSequence(1.0, 3));
  CHECK(w.norm() < 1e-12);
  CHECK(pseudo_cos_phi(p, PulseSequence(1.0, 3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("A = 0 carries no contrast and is rejected") {
  TwoSpinParams p;
  p.omega0 = 1.0;
  CHECK_THROWS_AS((void)pseudo_spin_fields(p), NumericalError);
}

TEST_CASE("relabeled closed form is exact against the 2-dim pseudo simulation") {
  Rng rng(71);
  for (int rep = 0; rep < 100; ++rep) {
    TwoSpinParams p;
    p.omega0 = 1.0;
    p.inter_ax = 2.0 * rng.uniform() - 1.0;
    p.a_z1 = 2.0 * rng.uniform() - 1.0;
    p.a_z2 = 2.0 * rng.uniform() - 1.0;
    if (p.big_a() < 1e-3) continue;
    const PulseSequence seq(0.1 + 6.0 * rng.uniform(), 1 + static_cast<int>(rng.next_u64() % 12));
    const Matrix rho = random_subspace_state(rng);
    const double closed = -pseudo_weighted_axis(p, seq).dot(pseudo_bloch(rho));
    CHECK(closed == doctest::Approx(pseudo_direct_sy(p, seq, rho)).epsilon(1e-11));
  }
}

TEST_CASE("Bell state witnesses from direct expectation") {
  const Eigen::Vector3d rt = pseudo_bloch(bell_state());
  CHECK(rt.x() == doctest::Approx(1.0));  // r~x = <sx1 sx2 + sy1 sy2>/2
  CHECK(rt.y() == doctest::Approx(0.0));  // r~y = <sy1 sx2 - sx1 sy2>/2
}

TEST_CASE("product state |01> witnesses") {
  Matrix rho = Matrix::Zero(4, 4);
  rho(1, 1) = 1.0;
  const Eigen::Vector3d rt = pseudo_bloch(rho);
  CHECK(rt.x() == doctest::Approx(0.0));
  CHECK(rt.y() == doctest::Approx(0.0));
  CHECK(rt.z() == doctest::Approx(1.0));  // |01> is the pseudo-spin up state
}

TEST_CASE("closed form vs 8-dim oracle at weak coupling") {
  const TwoSpinParams p = weak_fixture(0.01);
  const PulseSequence seq = measurement_settings_y(pseudo_spin_fields(p), 40);
  Rng rng(72);
  double worst = 0.0;
  std::vector<Matrix> states{bell_state()};
  for (int k = 0; k < 4; ++k) states.push_back(random_subspace_state(rng));
  for (const Matrix& rho : states) {
    const WitnessResult w = witness_measurement(p, seq, DensityMatrix(rho));
    worst = std::max(worst, w.abs_err);
    CHECK_FALSE(w.low_signal);
    CHECK(w.subspace_pop == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("oracle conserves probability and bounds the leakage") {
  const TwoSpinParams p = weak_fixture(0.01);
  const PulseSequence seq = measurement_settings_y(pseudo_spin_fields(p), 40);
  const auto [u0, u1] = sequence_propagators(p.v0(), p.v1(), seq);
  // unitarity = probability conservation
  CHECK((u0.adjoint() * u0 - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  const Matrix rho_t = u1 * bell_state() * u1.adjoint();
  const double leak = (rho_t(0, 0) + rho_t(3, 3)).real();
  const double scale = 0.01 / p.omega0;
  CHECK(leak <= 10.0 * scale * scale);
  CHECK(std::abs(rho_t.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("low subspace population raises the warning flag") {
  const TwoSpinParams p = weak_fixture(0.01);
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 0.995;
  rho(1, 1) = 0.005;
  const WitnessResult w = witness_measurement(p, PulseSequence(1.0, 1), DensityMatrix(rho));
  CHECK(w.low_signal);
}

TEST_CASE("weak-coupling flag tracks the 0.1 omega0 threshold") {
  CHECK(weak_fixture(0.01).weak_coupling());
  CHECK_FALSE(weak_fixture(0.2).weak_coupling());
}

TEST_CASE("witnesses from a reconstructed pseudo-spin Bloch vector") {
  // full tomography loop on the pseudo spin: three settings, oracle-measured
  // probe outcomes, linear inversion in the relabeled frame
  const TwoSpinParams p = weak_fixture(0.01);
  const SpinFields pf = pseudo_spin_fields(p);
  const PulseSequence seq_y = measurement_settings_y(pf, 40);
  const std::array<PulseSequence, 3> settings{seq_y, PulseSequence(0.43 * seq_y.tau, 2),
                                              PulseSequence(1.37 * seq_y.tau, 3)};
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) m.row(i) = -pseudo_weighted_axis(p, settings[i]).transpose();
  REQUIRE(std::abs(m.determinant()) > 1e-3);

  Rng rng(88);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix rho = random_subspace_state(rng);
    Eigen::Vector3d measured;
    for (int i = 0; i < 3; ++i)
      measured(i) = witness_measurement(p, settings[i], DensityMatrix(rho)).sy_oracle;
    const Eigen::Vector3d r_rec = m.fullPivLu().solve(measured);
    const Eigen::Vector3d r_direct = pseudo_bloch(rho);
    // closed-vs-oracle tolerance, inflated by the inversion conditioning
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    CHECK((r_rec - r_direct).norm() <= 0.05 * cond);
    CHECK((r_rec.head<2>() - r_direct.head<2>()).norm() <= 0.05 * cond);  // the witnesses
  }
}
