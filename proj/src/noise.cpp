#include "darkprobe/noise.hpp"

#include <cmath>
#include <thread>

#include "darkprobe/rng.hpp"

namespace darkprobe {

namespace {

using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

// exp(-i H dt) for Hermitian 2x2 H = a0 I + a.sigma, closed form
M2 expm2(const M2& h, double dt) {
  const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double ax = h(1, 0).real();
  const double ay = h(1, 0).imag();
  const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double r = std::sqrt(ax * ax + ay * ay + az * az);
  const Complex phase = std::exp(Complex(0.0, -a0 * dt));
  M2 u;
  if (r * dt < 1e-300) {
    u = M2::Identity();
  } else {
    const double c = std::cos(r * dt), s = std::sin(r * dt) / r;
    u << Complex(c, -s * az), Complex(-s * ay, -s * ax),
         Complex(s * ay, -s * ax), Complex(c, s * az);
  }
  return phase * u;
}

struct StepSetup {
  M2 v0, v1;
  double dt;
  int steps_per_interval;
  double tau_snapped;
};

StepSetup make_setup(const SpinFields& f, double tau, const NoiseModel& m) {
  StepSetup s;
  s.v0 = f.v0();
  s.v1 = f.v1();
  if (m.dt > 0.0) {
    s.steps_per_interval = std::max(1, static_cast<int>(std::lround(tau / m.dt)));
    s.dt = m.dt;
    s.tau_snapped = s.steps_per_interval * m.dt;
  } else {
    s.steps_per_interval = 50;
    s.dt = tau / 50.0;
    s.tau_snapped = tau;
  }
  return s;
}

NoisyResult run_monte_carlo(const SpinFields& f, double tau, int intervals, bool pulsed,
                            const DensityMatrix& rho, const NoiseModel& m, int threads) {
  if (m.realizations < 1)
    throw std::invalid_argument("noise: realizations must be >= 1");
  if (m.b0 < 0.0) throw std::invalid_argument("noise: b0 must be >= 0");
  const StepSetup s = make_setup(f, tau, m);
  const std::size_t nsteps = static_cast<std::size_t>(intervals) * s.steps_per_interval;

  // basis layout kron(probe, dark): index = 2*probe + dark
  M4 rho_full = M4::Zero();
  M2 plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      rho_full.block<2, 2>(2 * i, 2 * j) = plus(i, j) * rho.mat();

  M4 pulse = M4::Zero();
  pulse.block<2, 2>(0, 2) = M2::Identity();
  pulse.block<2, 2>(2, 0) = M2::Identity();

  const double decay = std::exp(-s.dt / m.tb);
  const double kick = m.b0 * std::sqrt(1.0 - decay * decay);

  std::vector<Complex> results(m.realizations);
  auto worker = [&](int lo, int hi) {
    std::vector<double> path(nsteps);
    for (int k = lo; k < hi; ++k) {
      // realization-indexed stream: reproducible under any thread count
      Rng rng(m.seed, static_cast<uint64_t>(k));
      double b = m.b0 * rng.gaussian();
      for (std::size_t i = 0; i < nsteps; ++i) {
        path[i] = b;
        b = b * decay + kick * rng.gaussian();
      }
      M4 u = M4::Identity();
      std::size_t step = 0;
      for (int j = 0; j < intervals; ++j) {
        for (int q = 0; q < s.steps_per_interval; ++q, ++step) {
          M4 ustep = M4::Zero();
          ustep.block<2, 2>(0, 0) = expm2(s.v0 + 0.5 * path[step] * M2::Identity(), s.dt);
          ustep.block<2, 2>(2, 2) = expm2(s.v1 - 0.5 * path[step] * M2::Identity(), s.dt);
          u = ustep * u;
        }
        if (pulsed) u = pulse * u;
      }
      const M4 rho_t = u * rho_full * u.adjoint();
      const Complex r01 = rho_t(0, 2) + rho_t(1, 3);  // <0|rho_probe|1>
      const Complex r10 = rho_t(2, 0) + rho_t(3, 1);
      results[k] = Complex((r01 + r10).real(), (Complex(0, 1) * (r01 - r10)).real());
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || m.realizations < 2 * nthreads) {
    worker(0, m.realizations);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (m.realizations + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int lo = t * chunk, hi = std::min(m.realizations, (t + 1) * chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // fixed index-order aggregation keeps results bit-exact across thread counts
  double sx_sum = 0.0, sy_sum = 0.0;
  for (const Complex& c : results) {
    sx_sum += c.real();
    sy_sum += c.imag();
  }
  const double n = static_cast<double>(m.realizations);
  NoisyResult out;
  out.sx_mean = sx_sum / n;
  out.sy_mean = sy_sum / n;
  double sx_var = 0.0, sy_var = 0.0;
  for (const Complex& c : results) {
    sx_var += (c.real() - out.sx_mean) * (c.real() - out.sx_mean);
    sy_var += (c.imag() - out.sy_mean) * (c.imag() - out.sy_mean);
  }
  if (m.realizations > 1) {
    out.sx_stderr = std::sqrt(sx_var / (n - 1.0) / n);
    out.sy_stderr = std::sqrt(sy_var / (n - 1.0) / n);
  }
  out.tau_snapped = s.tau_snapped;
  return out;
}

}  // namespace

std::vector<double> ou_trajectory(const NoiseModel& m, double duration, uint64_t stream) {
  if (!(duration > 0.0)) throw std::invalid_argument("ou_trajectory: duration must be > 0");
  if (m.b0 < 0.0) throw std::invalid_argument("ou_trajectory: b0 must be >= 0");
  const double dt = m.dt > 0.0 ? m.dt : duration / 1000.0;
  const std::size_t nsteps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-12));
  std::vector<double> path(nsteps + 1);
  Rng rng(m.seed, stream);
  path[0] = m.b0 * rng.gaussian();
  const double decay = std::exp(-dt / m.tb);
  const double kick = m.b0 * std::sqrt(1.0 - decay * decay);
  for (std::size_t i = 0; i < nsteps; ++i)
    path[i + 1] = path[i] * decay + kick * rng.gaussian();
  return path;
}

NoisyResult noisy_spin_measurement(const SpinFields& f, const PulseSequence& seq,
                                   const DensityMatrix& rho, const NoiseModel& m, int threads) {
  return run_monte_carlo(f, seq.tau, 2 * seq.n_segments, true, rho, m, threads);
}

NoisyResult noisy_ramsey_measurement(const SpinFields& f, double total_time,
                                     const DensityMatrix& rho, const NoiseModel& m, int threads) {
  return run_monte_carlo(f, total_time, 1, false, rho, m, threads);
}

}  // namespace darkprobe
