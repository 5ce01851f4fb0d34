#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "darkprobe/linalg.hpp"
#include "darkprobe/rng.hpp"

using namespace darkprobe;

namespace {

Matrix random_hermitian(int dim, Rng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
  return 0.5 * (a + a.adjoint()).eval();
}

DensityMatrix random_density(int dim, Rng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("expm of the zero generator is the identity") {
  const Matrix u = expm_hermitian(Matrix::Zero(2, 2), 1.7);
  CHECK((u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("expm of sigma_z/2 over t = pi gives diag(-i, i)") {
  const Matrix u = expm_hermitian(0.5 * pauli_z(), 3.14159265358979323846);
  CHECK(std::abs(u(0, 0) - Complex(0, -1)) < 1e-12);
  CHECK(std::abs(u(1, 1) - Complex(0, 1)) < 1e-12);
  CHECK(std::abs(u(0, 1)) < 1e-15);
}

TEST_CASE("expm matches an independent Pade-based exponential") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix h = random_hermitian(4, rng);
    const double t = 0.37;
    const Matrix u = expm_hermitian(h, t);
    const Matrix ref = (Complex(0, -t) * h).exp();
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(unitarity_defect(u) < 1e-10);
  }
}

TEST_CASE("expm rejects non-Hermitian generators with a diagnostic") {
  Matrix h(2, 2);
  h << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_WITH_AS(expm_hermitian(h, 1.0), doctest::Contains("not Hermitian"),
                       std::invalid_argument);
}

TEST_CASE("expm group property exp(H t1) exp(H t2) = exp(H (t1+t2))") {
  Rng rng(7);
  const Matrix h = random_hermitian(5, rng);
  const Matrix lhs = expm_hermitian(h, 0.4) * expm_hermitian(h, 1.3);
  const Matrix rhs = expm_hermitian(h, 1.7);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("commuting potentials collapse the sequence to plain evolution") {
  Rng rng(3);
  const Matrix v = random_hermitian(3, rng);
  const PulseSequence seq(0.8, 4);
  const auto [u0, u1] = sequence_propagators(v, v, seq);
  const Matrix ref = expm_hermitian(v, seq.total_time());
  CHECK((u0 - ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((u1 - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("N segments equal the single segment applied N times") {
  Rng rng(11);
  const Matrix v0 = random_hermitian(3, rng);
  const Matrix v1 = random_hermitian(3, rng);
  const auto [a0, a1] = sequence_propagators(v0, v1, PulseSequence(0.6, 1));
  const auto [b0, b1] = sequence_propagators(v0, v1, PulseSequence(0.6, 2));
  CHECK((b0 - a0 * a0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b1 - a1 * a1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(unitarity_defect(b0) < 1e-10);
  CHECK(unitarity_defect(b1) < 1e-10);
}

TEST_CASE("probe expectations of identical propagators") {
  Rng rng(5);
  const auto rho = random_density(4, rng);
  const Matrix u = expm_hermitian(random_hermitian(4, rng), 1.0);
  const auto [sx, sy] = probe_expectations(u, u, rho);
  CHECK(sx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sy == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("probe expectations of U0^dag U1 = -i sigma_y") {
  // rho = (1 + 0.4 sigma_y)/2; Tr{-i sigma_y rho} = -0.4 i
  const DensityMatrix rho(0.5 * (Matrix::Identity(2, 2) + 0.4 * pauli_y()));
  const Matrix u0 = Matrix::Identity(2, 2);
  const Matrix u1 = Complex(0, -1) * pauli_y();
  const auto [sx, sy] = probe_expectations(u0, u1, rho);
  CHECK(sx == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sy == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("two-operator formula equals the full-space pulsed oracle") {
  Rng rng(2024);
  for (int rep = 0; rep < 15; ++rep) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 3);
    const Matrix v0 = random_hermitian(dim, rng);
    const Matrix v1 = random_hermitian(dim, rng);
    const auto rho = random_density(dim, rng);
    const PulseSequence seq(0.1 + rng.uniform(), 1 + static_cast<int>(rng.next_u64() % 6));
    const auto [u0, u1] = sequence_propagators(v0, v1, seq);
    const auto [sx_a, sy_a] = probe_expectations(u0, u1, rho);
    const auto [sx_b, sy_b] = probe_expectations_fullspace(v0, v1, seq, rho);
    CHECK(std::abs(sx_a - sx_b) < 1e-10);
    CHECK(std::abs(sy_a - sy_b) < 1e-10);
    CHECK(sx_a * sx_a + sy_a * sy_a <= 1.0 + 1e-10);
  }
}

TEST_CASE("trace distance basics") {
  Rng rng(9);
  const auto rho = random_density(3, rng);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0));

  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  CHECK(trace_distance(DensityMatrix(p0), DensityMatrix(p1)) == doctest::Approx(1.0));

  const DensityMatrix a(0.5 * Matrix::Identity(2, 2));
  const DensityMatrix b(0.5 * (Matrix::Identity(2, 2) + 0.4 * pauli_y()));
  CHECK(trace_distance(a, b) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("trace distance triangle inequality on random triples") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const auto a = random_density(4, rng);
    const auto b = random_density(4, rng);
    const auto c = random_density(4, rng);
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10);
  }
}

TEST_CASE("partial trace of a product state recovers the probe factor") {
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  Rng rng(13);
  const auto rho_dark = random_density(3, rng);
  const Matrix full = kron(plus, rho_dark.mat());
  CHECK((partial_trace_probe(full) - plus).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a maximally entangled state is maximally mixed") {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const Matrix full = psi * psi.adjoint();
  CHECK((partial_trace_probe(full) - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("probe coherence block of the sequence output state") {
  Rng rng(17);
  const Matrix v0 = random_hermitian(2, rng);
  const Matrix v1 = random_hermitian(2, rng);
  const auto rho = random_density(2, rng);
  const PulseSequence seq(0.9, 3);
  const auto [u0, u1] = sequence_propagators(v0, v1, seq);
  // rho_full(t) per the branch expansion; probe (1,0) block is Tr{U1 rho U0^dag}/2
  Matrix full = Matrix::Zero(4, 4);
  full.block(0, 0, 2, 2) = 0.5 * u0 * rho.mat() * u0.adjoint();
  full.block(0, 2, 2, 2) = 0.5 * u0 * rho.mat() * u1.adjoint();
  full.block(2, 0, 2, 2) = 0.5 * u1 * rho.mat() * u0.adjoint();
  full.block(2, 2, 2, 2) = 0.5 * u1 * rho.mat() * u1.adjoint();
  const Matrix probe = partial_trace_probe(full);
  const Complex expect = 0.5 * (u1 * rho.mat() * u0.adjoint()).trace();
  CHECK(std::abs(probe(1, 0) - expect) < 1e-12);
  CHECK(std::abs(probe.trace() - 1.0) < 1e-12);
}

TEST_CASE("partial trace rejects odd dimensions") {
  CHECK_THROWS_AS(partial_trace_probe(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("density matrix validation") {
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK_THROWS_AS((void)DensityMatrix{eye}, std::invalid_argument);  // trace 2
  Matrix nh(2, 2);
  nh << 0.5, 0.3, 0.1, 0.5;
  CHECK_THROWS_AS((void)DensityMatrix{nh}, std::invalid_argument);
  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS((void)DensityMatrix{neg}, std::invalid_argument);
}

TEST_CASE("pulse sequence validation") {
  CHECK_THROWS_AS(PulseSequence(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(PulseSequence(1.0, 0), std::invalid_argument);
  CHECK(PulseSequence(0.5, 4).total_time() == doctest::Approx(4.0));
}
