#include "darkprobe/twospin.hpp"

#include <cmath>

namespace darkprobe {

namespace {

Matrix op1(const Matrix& a) { return kron(a, Matrix::Identity(2, 2)); }
Matrix op2(const Matrix& a) { return kron(Matrix::Identity(2, 2), a); }

}  // namespace

bool TwoSpinParams::weak_coupling() const {
  const double c = std::max({std::abs(a_z1), std::abs(a_z2), std::abs(a_x1), std::abs(a_x2),
                             std::abs(inter_ax)});
  return c <= 0.1 * omega0;
}

Matrix TwoSpinParams::v0() const {
  return 0.5 * omega0 * (op1(pauli_z()) + op2(pauli_z())) +
         0.5 * inter_ax * (op1(pauli_x()) * op2(pauli_x()));
}

Matrix TwoSpinParams::v1() const {
  return v0() + 0.5 * a_z1 * op1(pauli_z()) + 0.5 * a_z2 * op2(pauli_z()) +
         0.5 * a_x1 * op1(pauli_x()) + 0.5 * a_x2 * op2(pauli_x());
}

SpinFields pseudo_spin_fields(const TwoSpinParams& p) {
  if (p.big_a() == 0.0)
    throw NumericalError("pseudo_spin_fields: A = 0, the pseudo spin carries no contrast");
  return SpinFields::from_couplings(p.inter_ax, 0.0, p.big_az());
}

Eigen::Vector3d pseudo_weighted_axis(const TwoSpinParams& p, const PulseSequence& seq) {
  const Eigen::Vector3d w = spin_observable(pseudo_spin_fields(p), seq).weighted_axis;
  return {w.z(), -w.y(), w.x()};
}

double pseudo_cos_phi(const TwoSpinParams& p, const PulseSequence& seq) {
  return spin_observable(pseudo_spin_fields(p), seq).cos_phi;
}

Eigen::Vector3d pseudo_bloch(const Matrix& rho2) {
  if (rho2.rows() != 4 || rho2.cols() != 4)
    throw std::invalid_argument("pseudo_bloch: expected a 4x4 matrix");
  // basis order |00>, |01>, |10>, |11>
  const Complex c = rho2(2, 1);  // <10|rho|01>
  return {2.0 * c.real(), 2.0 * c.imag(), (rho2(1, 1) - rho2(2, 2)).real()};
}

double subspace_population(const Matrix& rho2) {
  return (rho2(1, 1) + rho2(2, 2)).real();
}

WitnessResult witness_measurement(const TwoSpinParams& p, const PulseSequence& seq,
                                  const DensityMatrix& rho2) {
  WitnessResult out;
  out.subspace_pop = subspace_population(rho2.mat());
  out.low_signal = out.subspace_pop < 0.01;

  const Eigen::Vector3d w = pseudo_weighted_axis(p, seq);
  out.sy_closed = -w.dot(pseudo_bloch(rho2.mat()));

  const auto [sx, sy] = probe_expectations_fullspace(p.v0(), p.v1(), seq, rho2);
  out.sy_oracle = sy;
  out.abs_err = std::abs(out.sy_closed - out.sy_oracle);
  return out;
}

}  // namespace darkprobe
