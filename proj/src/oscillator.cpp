#include "darkprobe/oscillator.hpp"

#include <cmath>
#include <numbers>

#include "darkprobe/scatter.hpp"

namespace darkprobe {

namespace {

Matrix annihilation(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace

Matrix OscParams::v0(int dim) const {
  const Matrix a = annihilation(dim);
  return nu * (a.adjoint() * a).eval() - 0.5 * g * (a + a.adjoint());
}

Matrix OscParams::v1(int dim) const {
  const Matrix a = annihilation(dim);
  return nu * (a.adjoint() * a).eval() + 0.5 * g * (a + a.adjoint());
}

Complex xi_curve(const OscParams& p, double tau, int n_segments) {
  const double y = p.nu * tau;
  const Complex w = std::exp(Complex(0.0, y));
  // alternating geometric sum (1 - w^{2N}) / (1 + w) kept as a finite sum,
  // so the tangent pole at y = pi never appears
  Complex sum = 0.0;
  Complex wk = 1.0;
  for (int k = 0; k < 2 * n_segments; ++k) {
    sum += (k % 2 == 0) ? wk : -wk;
    wk *= w;
  }
  return (p.g / p.nu) * (1.0 - w) * sum;
}

Complex xi_no_pulse(const OscParams& p, double tau) {
  return (p.g / p.nu) * (1.0 - std::exp(Complex(0.0, p.nu * tau)));
}

double laguerre(int m, int k, double x) {
  if (m < 0) throw std::invalid_argument("laguerre: m must be >= 0");
  if (m == 0) return 1.0;
  double lm1 = 1.0;                       // L_0
  double l = 1.0 + k - x;                 // L_1
  for (int j = 2; j <= m; ++j) {
    const double next = ((2.0 * j - 1.0 + k - x) * l - (j - 1.0 + k) * lm1) / j;
    lm1 = l;
    l = next;
  }
  return l;
}

Complex displacement_element(Complex xi, int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("displacement_element: negative index");
  const bool swapped = n < m;
  if (swapped) {
    std::swap(n, m);
    xi = -std::conj(xi);
  }
  const int k = n - m;
  const double x = std::norm(xi);
  // sqrt(m!/n!) |xi|^k in log space
  const double logpre = 0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)) +
                        (k > 0 ? k * std::log(std::max(std::abs(xi), 1e-300)) : 0.0);
  Complex phase = 1.0;
  if (k > 0 && std::abs(xi) > 0.0) {
    const Complex u = xi / std::abs(xi);
    phase = std::pow(u, k);
  } else if (k > 0) {
    return 0.0;  // xi = 0 and n != m
  }
  return std::exp(logpre - 0.5 * x) * phase * laguerre(m, k, x);
}

Matrix displacement_matrix(Complex xi, int dim) {
  if (dim < 1) throw std::invalid_argument("displacement_matrix: dim must be >= 1");
  Matrix d(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m) d(n, m) = displacement_element(xi, n, m);
  return d;
}

OscState OscState::fock(int n) {
  if (n < 0) throw std::invalid_argument("OscState::fock: n must be >= 0");
  OscState s;
  s.kind = Kind::Fock;
  s.n = n;
  return s;
}

OscState OscState::coherent(Complex eta) {
  OscState s;
  s.kind = Kind::Coherent;
  s.eta = eta;
  return s;
}

OscState OscState::squeezed(double lambda) {
  OscState s;
  s.kind = Kind::Squeezed;
  s.lambda = lambda;
  return s;
}

OscState OscState::parse(const std::string& name) {
  if (name == "vacuum") return fock(0);
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  try {
    if (head == "fock") return fock(std::stoi(arg));
    if (head == "coherent") return coherent(std::stod(arg));
    if (head == "squeezed") return squeezed(std::stod(arg));
  } catch (const std::exception&) {
    throw std::invalid_argument("OscState::parse: bad argument in '" + name + "'");
  }
  throw std::invalid_argument("OscState::parse: unknown fixture '" + name +
                              "' (use fock:n, coherent:eta, squeezed:lambda, vacuum)");
}

std::string OscState::name() const {
  switch (kind) {
    case Kind::Fock: return "fock:" + std::to_string(n);
    case Kind::Coherent: return "coherent:" + std::to_string(eta.real()) +
                                (eta.imag() != 0.0 ? "+" + std::to_string(eta.imag()) + "i" : "");
    case Kind::Squeezed: return "squeezed:" + std::to_string(lambda);
  }
  return "?";
}

Complex chi_exact(const OscState& s, Complex xi) {
  const double x2 = std::norm(xi);
  switch (s.kind) {
    case OscState::Kind::Fock:
      return laguerre(s.n, 0, x2) * std::exp(-0.5 * x2);
    case OscState::Kind::Coherent:
      return std::exp(-0.5 * x2) * std::exp(xi * std::conj(s.eta) - std::conj(xi) * s.eta);
    case OscState::Kind::Squeezed: {
      const double xr = xi.real(), im = xi.imag();
      return std::exp(-0.5 * std::exp(2.0 * s.lambda) * xr * xr -
                      0.5 * std::exp(-2.0 * s.lambda) * im * im);
    }
  }
  return 0.0;
}

Vector state_vector(const OscState& s, int dim) {
  Vector v = Vector::Zero(dim);
  switch (s.kind) {
    case OscState::Kind::Fock:
      if (s.n >= dim) throw std::invalid_argument("state_vector: Fock index beyond truncation");
      v(s.n) = 1.0;
      break;
    case OscState::Kind::Coherent: {
      // |eta> = e^{-|eta|^2/2} sum eta^n / sqrt(n!) |n>
      Complex amp = std::exp(-0.5 * std::norm(s.eta));
      for (int n = 0; n < dim; ++n) {
        v(n) = amp;
        amp *= s.eta / std::sqrt(n + 1.0);
      }
      v.normalize();
      break;
    }
    case OscState::Kind::Squeezed: {
      Vector vac = Vector::Zero(dim);
      vac(0) = 1.0;
      const Matrix a = annihilation(dim);
      // S = exp((l a^2 - l a^dag^2)/2) for real l: exp(-i H) with H = i(l a^2 - l a^dag^2)/2 Hermitian
      const Matrix h = Complex(0, 0.5) * (s.lambda * (a * a).eval() -
                                          s.lambda * (a.adjoint() * a.adjoint()).eval());
      v = expm_hermitian(h, 1.0) * vac;
      v.normalize();
      break;
    }
  }
  return v;
}

DensityMatrix state_density(const OscState& s, int dim) {
  const Vector v = state_vector(s, dim);
  return DensityMatrix((v * v.adjoint()).eval());
}

Complex simulate_probe_osc(const OscParams& p, const PulseSequence& seq,
                           const DensityMatrix& rho, double tail_tol) {
  const int dim = static_cast<int>(rho.dim());
  const auto [u0, u1] = sequence_propagators(p.v0(dim), p.v1(dim), seq);
  // truncation adequacy: the propagated branches must not populate the edge state
  const Matrix r0 = u0 * rho.mat() * u0.adjoint();
  const Matrix r1 = u1 * rho.mat() * u1.adjoint();
  const double tail = std::max(r0(dim - 1, dim - 1).real(), r1(dim - 1, dim - 1).real());
  if (tail > tail_tol)
    throw NumericalError("simulate_probe_osc: tail population " + std::to_string(tail) +
                         " exceeds " + std::to_string(tail_tol) + "; increase the truncation dim");
  const Complex a = (u0.adjoint() * u1 * rho.mat()).trace();
  return a;
}

std::vector<ChiSample> sample_characteristic(const OscParams& p, const std::vector<int>& n_list,
                                             const std::vector<double>& tau_grid,
                                             const OscState& state) {
  std::vector<ChiSample> out;
  out.reserve(2 * n_list.size() * tau_grid.size());
  for (int n : n_list)
    for (double tau : tau_grid) {
      const Complex xi = xi_curve(p, tau, n);
      const Complex chi = chi_exact(state, xi);
      out.push_back({xi, chi, tau, n, false});
      out.push_back({-xi, std::conj(chi), tau, n, true});
    }
  return out;
}

ChiGrid interpolate_chi(const std::vector<ChiSample>& samples, const GridSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("interpolate_chi: no samples");
  if (spec.points < 3 || spec.points % 2 == 0)
    throw std::invalid_argument("interpolate_chi: points must be odd and >= 3");

  std::vector<Eigen::Vector2d> pts;
  std::vector<Complex> vals;
  pts.reserve(samples.size() + 1);
  vals.reserve(samples.size() + 1);
  double max_r = 0.0;
  for (const auto& s : samples) {
    pts.emplace_back(s.xi.real(), s.xi.imag());
    vals.push_back(s.chi);
    max_r = std::max(max_r, std::abs(s.xi));
  }
  // chi(0) = 1 anchor
  pts.emplace_back(0.0, 0.0);
  vals.push_back(1.0);

  const ScatteredInterpolator interp(pts, vals);

  ChiGrid grid;
  grid.extent = std::min(spec.extent_cap, max_r);
  if (!(grid.extent > 0.0)) throw NumericalError("interpolate_chi: zero sampled extent");
  grid.points = spec.points;
  grid.field.resize(spec.points, spec.points);
  grid.far.setZero(spec.points, spec.points);

  for (int i = 0; i < spec.points; ++i) {
    const double x = grid.coord(i);
    for (int j = 0; j < spec.points; ++j) {
      const Eigen::Vector2d q(x, grid.coord(j));
      bool outside = false;
      Complex v = interp.interpolate(q, &outside);
      if (!outside && interp.nearest_distance(q) > spec.far_cutoff) outside = true;
      if (outside) {
        v = 0.0;
        grid.far(i, j) = 1;
        ++grid.far_count;
      }
      grid.field(i, j) = v;
    }
  }

  // Hermitian symmetry chi(-xi) = chi(xi)^*: average each mirror pair once
  const int last = spec.points - 1;
  for (int i = 0; i < spec.points; ++i)
    for (int j = 0; j < spec.points; ++j) {
      if (i * spec.points + j >= (last - i) * spec.points + (last - j)) continue;
      const Complex avg = 0.5 * (grid.field(i, j) + std::conj(grid.field(last - i, last - j)));
      grid.field(i, j) = avg;
      grid.field(last - i, last - j) = std::conj(avg);
    }
  grid.field(last / 2, last / 2) = 1.0;  // exact chi(0)
  return grid;
}

ReconstructionReport reconstruct_density(const ChiGrid& grid, int dim,
                                         double neg_mass_limit) {
  if (dim < 1) throw std::invalid_argument("reconstruct_density: dim must be >= 1");
  const int np = grid.points;
  const double h = 2.0 * grid.extent / (np - 1);

  std::vector<double> log_fact(dim);
  log_fact[0] = 0.0;
  for (int k = 1; k < dim; ++k) log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));

  Matrix rho = Matrix::Zero(dim, dim);
  std::vector<double> lag(dim);
  for (int i = 0; i < np; ++i) {
    const double wx = (i == 0 || i == np - 1) ? 0.5 : 1.0;
    const double x = grid.coord(i);
    for (int j = 0; j < np; ++j) {
      const Complex chi = grid.field(i, j);
      if (chi == Complex(0, 0)) continue;
      const double wy = (j == 0 || j == np - 1) ? 0.5 : 1.0;
      const Complex eta(-x, -grid.coord(j));  // D(-xi)
      const double r2 = std::norm(eta);
      const double logr = 0.5 * std::log(std::max(r2, 1e-300));
      const Complex u = r2 > 0.0 ? eta / std::abs(eta) : Complex(1, 0);
      const Complex weight = chi * (wx * wy * h * h / std::numbers::pi);
      for (int k = 0; k < dim; ++k) {
        const int mmax = dim - k;  // n = m + k stays inside the truncation
        lag[0] = 1.0;
        if (mmax > 1) lag[1] = 1.0 + k - r2;
        for (int m = 2; m < mmax; ++m)
          lag[m] = ((2.0 * m - 1.0 + k - r2) * lag[m - 1] - (m - 1.0 + k) * lag[m - 2]) / m;
        if (k == 0) {
          for (int m = 0; m < mmax; ++m)
            rho(m, m) += weight * std::exp(-0.5 * r2) * lag[m];
          continue;
        }
        if (r2 == 0.0) continue;  // off-diagonal elements of D(0) vanish
        const Complex uk = std::pow(u, k);
        const Complex uk_swapped = std::pow(-std::conj(u), k);
        for (int m = 0; m < mmax; ++m) {
          const int n = m + k;
          const double pre = std::exp(0.5 * (log_fact[m] - log_fact[n]) + k * logr - 0.5 * r2);
          // n >= m directly from the Laguerre form; n < m via eta -> -eta^*
          rho(n, m) += weight * pre * uk * lag[m];
          rho(m, n) += weight * pre * uk_swapped * lag[m];
        }
      }
    }
  }

  ReconstructionReport rep;
  rep.hermiticity_correction = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  Eigen::VectorXd w = es.eigenvalues();
  double neg = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w(k) < 0.0) {
      neg -= w(k);
      w(k) = 0.0;
    }
  rep.clipped_negative_mass = neg;
  if (neg > neg_mass_limit)
    throw NumericalError("reconstruct_density: clipped negative mass " + std::to_string(neg) +
                         " exceeds " + std::to_string(neg_mass_limit) +
                         "; coverage or grid quality insufficient");
  rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  const double tr = rho.trace().real();
  rep.trace_correction = std::abs(tr - 1.0);
  if (!(tr > 0.0)) throw NumericalError("reconstruct_density: nonpositive trace");
  rep.rho = rho / tr;
  return rep;
}

}  // namespace darkprobe
