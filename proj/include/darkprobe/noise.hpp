#ifndef DARKPROBE_NOISE_HPP
#define DARKPROBE_NOISE_HPP

#include <cstdint>
#include <vector>

#include "darkprobe/linalg.hpp"
#include "darkprobe/spin.hpp"

namespace darkprobe {

// Ornstein-Uhlenbeck probe dephasing: <b(t)b(0)> = b0^2 exp(-t/t_b),
// related to the free-induction decay time via T2p* = sqrt(2)/b0.
// The OU update itself is exact for any dt; the piecewise-constant
// propagation needs dt <= tb/20 for the noise to be resolved in time.
struct NoiseModel {
  double b0 = 0.0;          // noise standard deviation (angular frequency), >= 0
  double tb = 1.0;          // correlation time
  double dt = 0.0;          // discretization step; 0 = tau/50 at call time
  uint64_t seed = 0;
  int realizations = 1000;
};

// stationary OU path sampled on the dt grid, b(0) ~ N(0, b0^2); one value
// per grid time, nsteps+1 entries. The exact update holds for any dt:
// b(t+dt) = b(t) e^{-dt/tb} + b0 sqrt(1 - e^{-2dt/tb}) * N(0,1)
std::vector<double> ou_trajectory(const NoiseModel& m, double duration, uint64_t stream = 0);

struct NoisyResult {
  double sy_mean = 0.0;
  double sy_stderr = 0.0;
  double sx_mean = 0.0;
  double sx_stderr = 0.0;
  double tau_snapped = 0.0;  // tau after snapping to the dt grid
};

// Monte Carlo average of the pulsed measurement under H_noise = (b(t)/2) sigma_z^p;
// full probe (x) spin propagation with per-step piecewise-constant noise.
// Realization k uses the RNG stream (seed, k); aggregation in index order.
NoisyResult noisy_spin_measurement(const SpinFields& f, const PulseSequence& seq,
                                   const DensityMatrix& rho, const NoiseModel& m,
                                   int threads = 1);

// pulse-free Ramsey of the same total time, for side-by-side comparison
NoisyResult noisy_ramsey_measurement(const SpinFields& f, double total_time,
                                     const DensityMatrix& rho, const NoiseModel& m,
                                     int threads = 1);

}  // namespace darkprobe

#endif
