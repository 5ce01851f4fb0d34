#include "darkprobe/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace darkprobe::fixtures {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SpinFields fig1_nv() { return SpinFields::from_couplings(1.0, 0.015, 0.08); }

SpinFields nv_lab() {
  const double omega0 = kTwoPi * kGammaC * kNvLabField;
  return SpinFields::from_couplings(omega0, kTwoPi * kNvLabAParOver2Pi,
                                    kTwoPi * kNvLabAPerpOver2Pi);
}

OscParams yb_trap() {
  OscParams p;
  p.nu = kTwoPi * 117e3;
  p.g = 0.072 * p.nu;
  return p;
}

OscParams fig2() {
  OscParams p;
  p.nu = 1.0;
  p.g = 3.0 / 40.0;
  return p;
}

OscState fig2_squeezed() { return OscState::squeezed(std::log(0.5)); }
OscState fig2_coherent() { return OscState::coherent(1.0); }

std::vector<double> figs3_tb() { return {0.2e-3, 0.5e-3, 1.0e-3}; }
std::vector<double> figs3_b0_over_2pi() { return {9e3, 28e3, 56e3, 112e3}; }

void print_catalog(std::ostream& os) {
  os << "fig1-nv    dark spin, dimensionless: a_z = 0.015 omega0, a_x = 0.08 omega0\n"
     << "           (omega1 = " << fig1_nv().omega1 << " omega0, v_x = " << fig1_nv().v_x << ")\n"
     << "nv-lab     13C near an NV center: A_par/2pi = 2.54 kHz, A_perp/2pi = 13.22 kHz,\n"
     << "           B = 15.4 mT -> omega0/2pi = " << kGammaC * kNvLabField / 1e3 << " kHz\n"
     << "yb-trap    171Yb+ axial mode: nu/2pi = 117 kHz, g/nu = 0.072\n"
     << "fig2       oscillator reconstruction: g/nu = 3/40 = 0.075,\n"
     << "           squeezed vacuum lambda = log(1/2), coherent eta = 1\n"
     << "figS3      probe dephasing grid: t_b = {0.2, 0.5, 1} ms,\n"
     << "           b0/2pi = {9, 28, 56, 112} kHz (T2p* = sqrt(2)/b0), N = 10, tau = 3 us\n";
}

}  // namespace darkprobe::fixtures
