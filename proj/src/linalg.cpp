#include "darkprobe/linalg.hpp"

#include <cmath>

namespace darkprobe {

PulseSequence::PulseSequence(double tau_, int n_segments_) : tau(tau_), n_segments(n_segments_) {
  if (!(tau > 0.0)) throw std::invalid_argument("PulseSequence: tau must be > 0");
  if (n_segments < 1) throw std::invalid_argument("PulseSequence: N must be >= 1");
}

DensityMatrix::DensityMatrix(Matrix m, double herm_tol, double trace_tol, double eig_floor)
    : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw std::invalid_argument("DensityMatrix: not square");
  if (!mat_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
  const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol * scale)
    throw std::invalid_argument("DensityMatrix: not Hermitian, ||rho - rho^dag|| = " +
                                std::to_string(herm));
  const Complex tr = mat_.trace();
  if (std::abs(tr - 1.0) > trace_tol * std::max(1.0, std::abs(tr)))
    throw std::invalid_argument("DensityMatrix: trace != 1, got " + std::to_string(tr.real()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + mat_.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < eig_floor)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lo));
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix expm_hermitian(const Matrix& h, double t, double herm_tol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("expm_hermitian: not square");
  if (!h.allFinite()) throw std::invalid_argument("expm_hermitian: non-finite entries");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol * scale)
    throw std::invalid_argument("expm_hermitian: generator not Hermitian, ||H - H^dag|| = " +
                                std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -w(k) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::pair<Matrix, Matrix> sequence_propagators(const Matrix& v0, const Matrix& v1,
                                               const PulseSequence& seq) {
  if (v0.rows() != v1.rows() || v0.cols() != v1.cols())
    throw std::invalid_argument("sequence_propagators: dimension mismatch");
  const Matrix e0 = expm_hermitian(v0, seq.tau);
  const Matrix e1 = expm_hermitian(v1, seq.tau);
  const Matrix u0 = e1 * e0;
  const Matrix u1 = e0 * e1;
  Matrix p0 = Matrix::Identity(v0.rows(), v0.cols());
  Matrix p1 = p0;
  for (int k = 0; k < seq.n_segments; ++k) {
    p0 = u0 * p0;
    p1 = u1 * p1;
  }
  return {p0, p1};
}

std::pair<double, double> probe_expectations(const Matrix& u0, const Matrix& u1,
                                             const DensityMatrix& rho) {
  if (u0.rows() != rho.dim() || u1.rows() != rho.dim())
    throw std::invalid_argument("probe_expectations: dimension mismatch");
  const Complex a = (u0.adjoint() * u1 * rho.mat()).trace();
  return {a.real(), a.imag()};
}

std::pair<double, double> probe_expectations_fullspace(const Matrix& v0, const Matrix& v1,
                                                       const PulseSequence& seq,
                                                       const DensityMatrix& rho_dark) {
  const Eigen::Index d = v0.rows();
  if (v1.rows() != d || rho_dark.dim() != d)
    throw std::invalid_argument("probe_expectations_fullspace: dimension mismatch");
  Matrix proj0 = Matrix::Zero(2, 2), proj1 = Matrix::Zero(2, 2);
  proj0(0, 0) = 1.0;
  proj1(1, 1) = 1.0;
  const Matrix h = kron(proj0, v0) + kron(proj1, v1);
  const Matrix pulse = kron(pauli_x(), Matrix::Identity(d, d));
  const Matrix step = pulse * expm_hermitian(h, seq.tau);
  Matrix u = Matrix::Identity(2 * d, 2 * d);
  for (int k = 0; k < 2 * seq.n_segments; ++k) u = step * u;

  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Matrix rho_t = u * kron(plus, rho_dark.mat()) * u.adjoint();
  const Matrix rho_p = partial_trace_probe(rho_t);
  const double sx = (pauli_x() * rho_p).trace().real();
  const double sy = (pauli_y() * rho_p).trace().real();
  return {sx, sy};
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.mat(), b.mat());
}

Matrix partial_trace_probe(const Matrix& rho_full) {
  const Eigen::Index n = rho_full.rows();
  if (n != rho_full.cols() || n % 2 != 0)
    throw std::invalid_argument("partial_trace_probe: dimension must be 2*d");
  const Eigen::Index d = n / 2;
  Matrix out = Matrix::Zero(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j)
      out(i, j) = rho_full.block(i * d, j * d, d, d).trace();
  return out;
}

}  // namespace darkprobe
