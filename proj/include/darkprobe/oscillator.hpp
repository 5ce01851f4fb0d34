#ifndef DARKPROBE_OSCILLATOR_HPP
#define DARKPROBE_OSCILLATOR_HPP

#include <string>
#include <vector>

#include "darkprobe/linalg.hpp"

namespace darkprobe {

// harmonic oscillator coupled to the probe:
// V0 = nu a^dag a - (g/2)(a + a^dag),  V1 = nu a^dag a + (g/2)(a + a^dag)
struct OscParams {
  double nu = 1.0;
  double g = 0.0;

  double epsilon() const { return g / (2.0 * nu); }
  Matrix v0(int dim) const;
  Matrix v1(int dim) const;
};

// reciprocal-phase-space point reached by the sequence (tau, N):
// xi = -2 (g/nu) sin(N nu tau) tan(nu tau / 2) e^{i N nu tau},
// evaluated through the pole-free product form
// xi = (g/nu) (1 - e^{i nu tau}) sum_{k=0}^{2N-1} (-1)^k e^{i k nu tau},
// finite at nu tau = pi where |xi| peaks at 4 N g / nu
Complex xi_curve(const OscParams& p, double tau, int n_segments);

// without pulses the reachable points lie on the circle of radius g/nu
// through the origin: U0^dag U1 = D((g/nu)(1 - e^{i nu tau}))
Complex xi_no_pulse(const OscParams& p, double tau);

// generalized Laguerre L_m^{(k)}(x) by the three-term recurrence
double laguerre(int m, int k, double x);

// <n|D(xi)|m>, prefactor in log space to survive large indices
Complex displacement_element(Complex xi, int n, int m);
Matrix displacement_matrix(Complex xi, int dim);

// named oscillator states with closed-form characteristic functions
struct OscState {
  enum class Kind { Fock, Coherent, Squeezed };
  Kind kind = Kind::Fock;
  int n = 0;           // Fock
  Complex eta = 0.0;   // Coherent
  double lambda = 0.0; // Squeezed, real parameter

  static OscState fock(int n);
  static OscState coherent(Complex eta);
  static OscState squeezed(double lambda);
  static OscState parse(const std::string& name);  // "fock:1", "coherent:1", "squeezed:-0.693..", "vacuum"
  std::string name() const;
};

// chi(xi) = Tr{D(xi) rho} in closed form
Complex chi_exact(const OscState& s, Complex xi);

// truncated Fock-space representation (column vector, then density)
Vector state_vector(const OscState& s, int dim);
DensityMatrix state_density(const OscState& s, int dim);

// sx + i sy from the truncated simulation; equals chi(xi(tau, N)) up to
// truncation error. Throws NumericalError when the propagated state's tail
// population at |dim-1> exceeds tail_tol.
Complex simulate_probe_osc(const OscParams& p, const PulseSequence& seq,
                           const DensityMatrix& rho, double tail_tol = 1e-6);

struct ChiSample {
  Complex xi;
  Complex chi;
  double tau = 0.0;
  int n_segments = 0;
  bool mirrored = false;
};

// chi along the curves (tau in tau_grid, N in n_list) plus the mirrored
// conjugate samples chi(-xi) = chi(xi)*
std::vector<ChiSample> sample_characteristic(const OscParams& p, const std::vector<int>& n_list,
                                             const std::vector<double>& tau_grid,
                                             const OscState& state);

struct GridSpec {
  double extent_cap = 6.0;  // R = min(extent_cap, max sampled |xi|)
  int points = 161;         // points per axis, odd keeps the origin on-grid
  double far_cutoff = 0.75; // grid points farther than this from all samples -> 0
};

struct ChiGrid {
  double extent = 0.0;                 // field covers [-extent, extent]^2
  int points = 0;
  Eigen::MatrixXcd field;              // field(i, j) = chi(x_i + i y_j)
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> far;  // 1 = zero-filled
  int far_count = 0;

  double coord(int i) const { return -extent + 2.0 * extent * i / (points - 1); }
};

// scattered-to-grid interpolation with chi(0) = 1 enforced and Hermitian
// symmetry imposed by averaging mirrored grid values
ChiGrid interpolate_chi(const std::vector<ChiSample>& samples, const GridSpec& spec);

struct ReconstructionReport {
  Matrix rho;
  double hermiticity_correction = 0.0;   // ||rho - rho^dag||_max before symmetrization
  double clipped_negative_mass = 0.0;    // sum of clipped negative eigenvalues
  double trace_correction = 0.0;         // |trace - 1| before renormalization
};

// rho[n][m] = (1/pi) sum_grid w(xi) chi(xi) <n|D(-xi)|m>, trapezoid weights,
// then Hermitized, eigenvalue-clipped at zero and renormalized.
// Throws NumericalError when the clipped negative mass exceeds neg_mass_limit.
ReconstructionReport reconstruct_density(const ChiGrid& grid, int dim,
                                         double neg_mass_limit = 0.05);

}  // namespace darkprobe

#endif
