#ifndef DARKPROBE_TWOSPIN_HPP
#define DARKPROBE_TWOSPIN_HPP

#include "darkprobe/linalg.hpp"
#include "darkprobe/spin.hpp"

namespace darkprobe {

// two interacting dark spins; the zero-magnetization subspace acts as a
// pseudo spin with V0 = (A_x/2) sx~, V1 = V0 + (A_z/2) sz~, A_z = a_z1 - a_z2.
// Pseudo-spin basis order (|01>, |10>) with standard Pauli matrices; the
// witness combinations of S9-S10 are exactly sx~ and sy~ in that basis.
struct TwoSpinParams {
  double omega0 = 0.0;
  double inter_ax = 0.0;  // A_x, inter-spin coupling
  double a_z1 = 0.0, a_z2 = 0.0;
  double a_x1 = 0.0, a_x2 = 0.0;

  double big_az() const { return a_z1 - a_z2; }
  double big_a() const { return std::hypot(inter_ax, big_az()); }
  bool weak_coupling() const;
  Matrix v0() const;  // 4x4, full H_d
  Matrix v1() const;  // 4x4, H_d + H_1
};

// pseudo-spin problem mapped onto the single-spin machinery:
// omega0 -> A_x, a_z -> 0, a_x -> A_z (so omega1 -> A, v_x -> A_z/A, v_z -> A_x/A)
SpinFields pseudo_spin_fields(const TwoSpinParams& p);

// closed-form weighted axis in the pseudo-spin frame; components relabeled
// (w_z, -w_y, w_x) relative to the mapped single-spin problem
Eigen::Vector3d pseudo_weighted_axis(const TwoSpinParams& p, const PulseSequence& seq);
double pseudo_cos_phi(const TwoSpinParams& p, const PulseSequence& seq);

// r~ = Tr{sigma~ P rho P} of the (unnormalized) subspace projection;
// r~x and r~y are the correlation witnesses
Eigen::Vector3d pseudo_bloch(const Matrix& rho2);
double subspace_population(const Matrix& rho2);

struct WitnessResult {
  double sy_closed = 0.0;   // pseudo-spin closed form on the subspace projection
  double sy_oracle = 0.0;   // full 2 (x) 4 propagation, no secular reduction
  double abs_err = 0.0;
  double subspace_pop = 0.0;
  bool low_signal = false;  // subspace population < 0.01
};

WitnessResult witness_measurement(const TwoSpinParams& p, const PulseSequence& seq,
                                  const DensityMatrix& rho2);

}  // namespace darkprobe

#endif
