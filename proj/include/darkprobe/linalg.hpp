#ifndef DARKPROBE_LINALG_HPP
#define DARKPROBE_LINALG_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace darkprobe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// numerical-quality failures (degenerate rotations, truncation overflow,
// reconstruction quality, ...); the CLI maps these to exit code 3
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// pulsed sequence: 2N pi pulses separated by the free-evolution time tau,
// total time t = 2 N tau
struct PulseSequence {
  double tau = 0.0;
  int n_segments = 1;

  PulseSequence() = default;
  PulseSequence(double tau_, int n_segments_);
  double total_time() const { return 2.0 * n_segments * tau; }
};

// Hermitian, unit-trace matrix; validated on construction
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, double herm_tol = 1e-12, double trace_tol = 1e-12,
                         double eig_floor = -1e-10);
  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
};

// standard Pauli matrices, basis order (|0>, |1>)
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

Matrix kron(const Matrix& a, const Matrix& b);

// exp(-i H t) for Hermitian H, via eigendecomposition.
// Rejects non-Hermitian input (relative tolerance herm_tol on ||H - H^dag||).
Matrix expm_hermitian(const Matrix& h, double t, double herm_tol = 1e-12);

// U0 = [e^{-iV1 tau} e^{-iV0 tau}]^N,  U1 = [e^{-iV0 tau} e^{-iV1 tau}]^N
std::pair<Matrix, Matrix> sequence_propagators(const Matrix& v0, const Matrix& v1,
                                               const PulseSequence& seq);

// (sx, sy) = (Re, Im) Tr{U0^dag U1 rho}
std::pair<double, double> probe_expectations(const Matrix& u0, const Matrix& u1,
                                             const DensityMatrix& rho);

// independent full-space route: probe (x) dark, explicit instantaneous
// sigma_x^p pulses, probe readout from the reduced state
std::pair<double, double> probe_expectations_fullspace(const Matrix& v0, const Matrix& v1,
                                                       const PulseSequence& seq,
                                                       const DensityMatrix& rho_dark);

// 1/2 sum |eigenvalues of a - b|
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);

// reduced probe state of a state on 2 (x) d
Matrix partial_trace_probe(const Matrix& rho_full);

}  // namespace darkprobe

#endif
