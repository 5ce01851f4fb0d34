#ifndef DARKPROBE_FIXTURES_HPP
#define DARKPROBE_FIXTURES_HPP

#include <iosfwd>
#include <vector>

#include "darkprobe/noise.hpp"
#include "darkprobe/oscillator.hpp"
#include "darkprobe/spin.hpp"

namespace darkprobe::fixtures {

// dimensionless single-spin fields (omega0 = 1): a_z = 0.015, a_x = 0.08
SpinFields fig1_nv();

// 13C nuclear spin near an NV center: A_par/2pi = 2.54 kHz,
// A_perp/2pi = 13.22 kHz, B = 15.4 mT, omega0 = gamma_C B
SpinFields nv_lab();
inline constexpr double kNvLabField = 15.4e-3;          // T
inline constexpr double kGammaC = 10.7084e6;            // Hz/T
inline constexpr double kNvLabAParOver2Pi = 2.54e3;     // Hz
inline constexpr double kNvLabAPerpOver2Pi = 13.22e3;   // Hz

// trapped 171Yb+ in a magnetic gradient: nu/2pi = 117 kHz, g/nu = 0.072
OscParams yb_trap();

// oscillator reconstruction fixture: g/nu = 3/40 with the squeezed vacuum
// lambda = log(1/2) and coherent eta = 1 states
OscParams fig2();
OscState fig2_squeezed();
OscState fig2_coherent();

// probe dephasing grid: tb in {0.2, 0.5, 1} ms, b0/2pi in {9, 28, 56, 112} kHz
std::vector<double> figs3_tb();
std::vector<double> figs3_b0_over_2pi();

void print_catalog(std::ostream& os);

}  // namespace darkprobe::fixtures

#endif
