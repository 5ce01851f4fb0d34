#ifndef DARKPROBE_SPIN_HPP
#define DARKPROBE_SPIN_HPP

#include <array>
#include <functional>
#include <vector>

#include "darkprobe/linalg.hpp"

namespace darkprobe {

// effective probe-conditional fields of a dark spin-1/2:
// V0 = (omega0/2) sigma_z, V1 = (omega1/2)(v_x sigma_x + v_z sigma_z)
struct SpinFields {
  double omega0 = 0.0;
  double a_z = 0.0;
  double a_x = 0.0;
  double omega1 = 0.0;  // sqrt((omega0+a_z)^2 + a_x^2)
  double v_x = 0.0;     // a_x / omega1
  double v_z = 0.0;     // (omega0 + a_z) / omega1

  static SpinFields from_couplings(double omega0, double a_z, double a_x);
  Matrix v0() const;
  Matrix v1() const;
};

struct AxisAngle {
  double angle = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
  bool axis_valid = false;  // false when sin(angle) ~ 0 (axis indeterminate)
};

struct SegmentRotation {
  double theta = 0.0;
  Eigen::Vector3d n0, n1;  // unit rotation axes of u0, u1; n1 = (n0x, -n0y, n0z)
};

// single pulse-segment rotation u_k = exp(-i theta n_k . sigma).
// Throws NumericalError when |sin theta| < 1e-9 (axes indeterminate).
SegmentRotation segment_rotation(const SpinFields& f, double tau);

// U0^dag U1 = exp(-i phi n . sigma) composed from N segment rotations
AxisAngle composite_rotation(double theta, const Eigen::Vector3d& n0,
                             const Eigen::Vector3d& n1, int n_segments);

// (cos phi, sin phi * n); the weighted axis needs no axis normalization and
// stays finite through sin phi = 0, including the tau -> 0 limit
struct SpinObservable {
  double cos_phi = 1.0;
  Eigen::Vector3d weighted_axis = Eigen::Vector3d::Zero();
};

SpinObservable spin_observable(const SpinFields& f, const PulseSequence& seq);

// without pulses: U0^dag U1 = exp(+i V0 tau) exp(-i V1 tau)
SpinObservable spin_observable_no_pulse(const SpinFields& f, double tau);

// r_y measurement settings: tau1 = 2 pi / (omega1 + omega0), N = round(pi / 4 v_x)
PulseSequence measurement_settings_y(const SpinFields& f, int n_max = 40);

struct SearchGrid {
  double tau_min = 0.0;  // exclusive; 0 means one grid step above zero
  double tau_max = 0.0;  // 0 means a fields-derived default
  int tau_points = 6000;
  int n_max = 40;
  double cos_phi_bound = 0.05;
};

struct SettingsSearchResult {
  PulseSequence seq{1.0, 1};
  SpinObservable observable;
  bool target_reached = false;  // |weighted axis component| >= 0.9
};

// grid searches maximizing |sin phi n_kappa| subject to |cos phi| <= bound
SettingsSearchResult measurement_settings_x(const SpinFields& f, const SearchGrid& grid);
SettingsSearchResult measurement_settings_z(const SpinFields& f, const SearchGrid& grid);

struct BlochReconstruction {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  double condition_number = 0.0;
  bool norm_clipped = false;
};

// linear inversion r = M^{-1} sy with rows M_i = -(sin phi n)(setting_i)
BlochReconstruction reconstruct_bloch(const std::array<PulseSequence, 3>& settings,
                                      const SpinFields& f,
                                      const Eigen::Vector3d& measured_sy);

// one row of an emitted (tau, N) scan
struct ScanRow {
  double tau = 0.0;
  int n_segments = 0;
  double cos_phi = 0.0;
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
};

std::vector<ScanRow> scan_observable(const SpinFields& f, const std::vector<double>& taus,
                                     const std::vector<int>& ns);

struct CouplingEstimate {
  double tau1 = 0.0;
  double omega1 = 0.0;
  int n_opt = 0;
  double a_x = 0.0;  // >= 0 by convention (only v_x^2 enters |cos phi|)
  double a_z = 0.0;
};

// two-stage inversion of a cos phi scan over a (tau, N) grid:
// dip position (parabolic refinement) -> omega1; N minimizing |cos phi| at
// the dip -> a_x = omega1 pi / (4 N); a_z = sqrt(omega1^2 - a_x^2) - omega0.
// Throws NumericalError when no dip is found (flat scan).
CouplingEstimate estimate_coupling(const std::vector<ScanRow>& scan, double omega0);

}  // namespace darkprobe

#endif
