#include "darkprobe/spin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace darkprobe {

namespace {

constexpr double kDegenerateSinTheta = 1e-9;

// unnormalized axis m0 = sin(theta) n0 and cos(theta); polynomial in the
// trigonometric factors, free of cancellation at small tau
struct RawSegment {
  double cos_theta;
  Eigen::Vector3d m0;  // sin(theta) * n0;  m1 = (m0x, -m0y, m0z)
};

RawSegment raw_segment(const SpinFields& f, double tau) {
  const double a = 0.5 * f.omega0 * tau;
  const double b = 0.5 * f.omega1 * tau;
  const double sa = std::sin(a), ca = std::cos(a);
  const double sb = std::sin(b), cb = std::cos(b);
  RawSegment s;
  s.cos_theta = ca * cb - f.v_z * sa * sb;
  s.m0 = {f.v_x * ca * sb, -f.v_x * sa * sb, sa * cb + f.v_z * ca * sb};
  return s;
}

SpinObservable compose(const RawSegment& s, int n_segments) {
  const double st = s.m0.norm();
  const double theta = std::atan2(st, s.cos_theta);
  const Eigen::Vector3d m1(s.m0.x(), -s.m0.y(), s.m0.z());
  const double big = n_segments * theta;
  const double c = std::cos(big), sN = std::sin(big);
  SpinObservable out;
  if (st < std::numeric_limits<double>::min()) {
    // u0 = +-identity; U0^dag U1 = identity
    out.cos_phi = 1.0;
    return out;
  }
  const double dot01 = s.m0.dot(m1) / (st * st);
  out.cos_phi = c * c + sN * sN * dot01;
  // sin(phi) n = sin(Ntheta) [cos(Ntheta)(n1 - n0) - sin(Ntheta)(n0 x n1)]
  out.weighted_axis = sN * (c * (m1 - s.m0) / st - sN * s.m0.cross(m1) / (st * st));
  return out;
}

}  // namespace

SpinFields SpinFields::from_couplings(double omega0, double a_z, double a_x) {
  SpinFields f;
  f.omega0 = omega0;
  f.a_z = a_z;
  f.a_x = a_x;
  f.omega1 = std::hypot(omega0 + a_z, a_x);
  if (!(f.omega1 > 0.0))
    throw std::invalid_argument("SpinFields: omega1 must be positive");
  f.v_x = a_x / f.omega1;
  f.v_z = (omega0 + a_z) / f.omega1;
  return f;
}

Matrix SpinFields::v0() const { return 0.5 * omega0 * pauli_z(); }

Matrix SpinFields::v1() const {
  return 0.5 * omega1 * (v_x * pauli_x() + v_z * pauli_z());
}

SegmentRotation segment_rotation(const SpinFields& f, double tau) {
  const RawSegment s = raw_segment(f, tau);
  const double st = s.m0.norm();
  if (st < kDegenerateSinTheta)
    throw NumericalError("segment_rotation: |sin theta| = " + std::to_string(st) +
                         " < 1e-9, rotation axis indeterminate; perturb tau");
  SegmentRotation r;
  r.theta = std::atan2(st, s.cos_theta);
  r.n0 = s.m0 / st;
  r.n1 = {r.n0.x(), -r.n0.y(), r.n0.z()};
  return r;
}

AxisAngle composite_rotation(double theta, const Eigen::Vector3d& n0,
                             const Eigen::Vector3d& n1, int n_segments) {
  const double big = n_segments * theta;
  const double c = std::cos(big), s = std::sin(big);
  const double cos_phi = c * c + s * s * n0.dot(n1);
  const Eigen::Vector3d w = s * (c * (n1 - n0) - s * n0.cross(n1));
  AxisAngle out;
  const double sin_phi = w.norm();
  out.angle = std::atan2(sin_phi, cos_phi);
  if (sin_phi >= 1e-9) {
    out.axis = w / sin_phi;
    out.axis_valid = true;
  }
  return out;
}

SpinObservable spin_observable(const SpinFields& f, const PulseSequence& seq) {
  return compose(raw_segment(f, seq.tau), seq.n_segments);
}

SpinObservable spin_observable_no_pulse(const SpinFields& f, double tau) {
  // exp(+i V0 tau) exp(-i V1 tau) is the alpha -> -alpha variant of u1;
  // same single-segment composition with m0 evaluated at -alpha and N = 1
  const double a = -0.5 * f.omega0 * tau;
  const double b = 0.5 * f.omega1 * tau;
  const double sa = std::sin(a), ca = std::cos(a);
  const double sb = std::sin(b), cb = std::cos(b);
  SpinObservable out;
  // u1-ordered product: exp(-i a sz) exp(-i b (vx sx + vz sz))
  const double cos_theta = ca * cb - f.v_z * sa * sb;
  const Eigen::Vector3d m(f.v_x * ca * sb, f.v_x * sa * sb, sa * cb + f.v_z * ca * sb);
  out.cos_phi = cos_theta;
  out.weighted_axis = m;
  return out;
}

PulseSequence measurement_settings_y(const SpinFields& f, int n_max) {
  if (f.v_x == 0.0)
    throw NumericalError("measurement_settings_y: a_x = 0, r_y is not measurable");
  const double tau1 = 2.0 * std::numbers::pi / (f.omega1 + f.omega0);
  const double n_ideal = std::numbers::pi / (4.0 * std::abs(f.v_x));
  const int n = std::max(1, static_cast<int>(std::lround(n_ideal)));
  if (n > n_max)
    throw NumericalError("measurement_settings_y: N = " + std::to_string(n) + " exceeds N_max = " +
                         std::to_string(n_max) + "; coupling a_x too weak");
  return PulseSequence(tau1, n);
}

namespace {

SettingsSearchResult settings_search(const SpinFields& f, const SearchGrid& grid, int axis) {
  const double tau1 = 2.0 * std::numbers::pi / (f.omega1 + f.omega0);
  const double tau_max = grid.tau_max > 0.0 ? grid.tau_max : 3.0 * tau1;
  if (!(tau_max > grid.tau_min) || grid.tau_points < 1 || grid.n_max < 1)
    throw std::invalid_argument("settings search: empty grid");
  const double step = (tau_max - grid.tau_min) / grid.tau_points;
  SettingsSearchResult best;
  double best_mag = -1.0;
  for (int n = 1; n <= grid.n_max; ++n) {
    for (int i = 1; i <= grid.tau_points; ++i) {
      const double tau = grid.tau_min + i * step;
      const SpinObservable o = compose(raw_segment(f, tau), n);
      if (std::abs(o.cos_phi) > grid.cos_phi_bound) continue;
      const double mag = std::abs(o.weighted_axis(axis));
      if (mag > best_mag) {
        best_mag = mag;
        best.seq = PulseSequence(tau, n);
        best.observable = o;
      }
    }
  }
  if (best_mag < 0.0)
    throw NumericalError("settings search: no grid point satisfies |cos phi| <= bound");
  best.target_reached = best_mag >= 0.9;
  return best;
}

}  // namespace

SettingsSearchResult measurement_settings_x(const SpinFields& f, const SearchGrid& grid) {
  return settings_search(f, grid, 0);
}

SettingsSearchResult measurement_settings_z(const SpinFields& f, const SearchGrid& grid) {
  return settings_search(f, grid, 2);
}

BlochReconstruction reconstruct_bloch(const std::array<PulseSequence, 3>& settings,
                                      const SpinFields& f,
                                      const Eigen::Vector3d& measured_sy) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    m.row(i) = -spin_observable(f, settings[i]).weighted_axis.transpose();
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(2) < 1e-12 * sv(0)) {
    const Eigen::Vector3d dir = svd.matrixV().col(2);
    throw NumericalError("reconstruct_bloch: singular settings matrix, unresolved direction (" +
                         std::to_string(dir.x()) + ", " + std::to_string(dir.y()) + ", " +
                         std::to_string(dir.z()) + ")");
  }
  BlochReconstruction out;
  out.condition_number = sv(0) / sv(2);
  out.r = m.fullPivLu().solve(measured_sy);
  if (out.r.norm() > 1.0) {
    out.r /= out.r.norm();
    out.norm_clipped = true;
  }
  return out;
}

std::vector<ScanRow> scan_observable(const SpinFields& f, const std::vector<double>& taus,
                                     const std::vector<int>& ns) {
  std::vector<ScanRow> rows;
  rows.reserve(taus.size() * ns.size());
  for (int n : ns)
    for (double tau : taus) {
      const SpinObservable o = compose(raw_segment(f, tau), n);
      rows.push_back({tau, n, o.cos_phi, o.weighted_axis});
    }
  return rows;
}

CouplingEstimate estimate_coupling(const std::vector<ScanRow>& scan, double omega0) {
  // group rows by N, preserving tau order
  std::map<int, std::vector<const ScanRow*>> by_n;
  for (const auto& r : scan) by_n[r.n_segments].push_back(&r);
  if (by_n.empty()) throw NumericalError("estimate_coupling: empty scan");

  // stage 1: tau dip from the smallest N whose dip is detectable
  constexpr double kDipDepth = 0.02;
  double tau1 = 0.0;
  bool found = false;
  for (const auto& [n, rows] : by_n) {
    std::size_t imin = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i]->cos_phi < rows[imin]->cos_phi) imin = i;
    if (rows[imin]->cos_phi > 1.0 - kDipDepth) continue;
    tau1 = rows[imin]->tau;
    if (imin > 0 && imin + 1 < rows.size()) {
      // parabolic refinement through the dip and its neighbors
      const double y0 = rows[imin - 1]->cos_phi, y1 = rows[imin]->cos_phi,
                   y2 = rows[imin + 1]->cos_phi;
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom > 0.0) {
        const double delta = 0.5 * (y0 - y2) / denom;
        const double h = 0.5 * (rows[imin + 1]->tau - rows[imin - 1]->tau);
        tau1 += std::clamp(delta, -1.0, 1.0) * h;
      }
    }
    found = true;
    break;
  }
  if (!found)
    throw NumericalError("estimate_coupling: no cos phi dip found (flat scan); "
                         "extend the tau range or increase N");

  CouplingEstimate est;
  est.tau1 = tau1;
  est.omega1 = 2.0 * std::numbers::pi / tau1 - omega0;
  if (!(est.omega1 > 0.0))
    throw NumericalError("estimate_coupling: inferred omega1 <= 0");

  // stage 2: |cos phi| dip over N at the tau grid column nearest tau1
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [n, rows] : by_n) {
    std::size_t inear = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (std::abs(rows[i]->tau - tau1) < std::abs(rows[inear]->tau - tau1)) inear = i;
    const double val = std::abs(rows[inear]->cos_phi);
    if (val < best) {
      best = val;
      est.n_opt = n;
    }
  }
  est.a_x = est.omega1 * std::numbers::pi / (4.0 * est.n_opt);
  if (est.a_x > est.omega1)
    throw NumericalError("estimate_coupling: inconsistent estimates (a_x > omega1)");
  est.a_z = std::sqrt(est.omega1 * est.omega1 - est.a_x * est.a_x) - omega0;
  return est;
}

}  // namespace darkprobe
