#include "darkprobe/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace darkprobe {

namespace {

inline double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies inside the circumcircle of ccw triangle (a, b, c)
inline double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

ScatteredInterpolator::ScatteredInterpolator(const std::vector<Eigen::Vector2d>& points,
                                             const std::vector<Complex>& values) {
  if (points.size() != values.size())
    throw std::invalid_argument("ScatteredInterpolator: points/values size mismatch");
  if (points.empty()) throw std::invalid_argument("ScatteredInterpolator: no points");

  Eigen::Vector2d lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
  Eigen::Vector2d hi = -lo;
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = std::max((hi - lo).norm(), 1e-300);
  const double snap = 1e-9 * diag;

  // merge near-duplicates on a snap grid, first occurrence wins
  std::unordered_map<long long, int> seen;
  auto key = [&](const Eigen::Vector2d& p) {
    const long long ix = static_cast<long long>(std::floor(p.x() / snap));
    const long long iy = static_cast<long long>(std::floor(p.y() / snap));
    return ix * 73856093LL ^ iy * 19349663LL;
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [it, fresh] = seen.emplace(key(points[i]), static_cast<int>(pts_.size()));
    if (fresh) {
      pts_.push_back(points[i]);
      vals_.push_back(values[i]);
    }
  }
  const int n = static_cast<int>(pts_.size());
  if (n < 3) throw NumericalError("ScatteredInterpolator: need at least 3 distinct points");

  // Bowyer-Watson insertion into a super-triangle
  const Eigen::Vector2d c = 0.5 * (lo + hi);
  const double r = 20.0 * diag + 1.0;
  pts_.push_back(c + Eigen::Vector2d(-2.0 * r, -r));
  pts_.push_back(c + Eigen::Vector2d(2.0 * r, -r));
  pts_.push_back(c + Eigen::Vector2d(0.0, 2.0 * r));
  vals_.resize(pts_.size(), Complex(0, 0));
  tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

  std::vector<int> cavity, stack;
  std::vector<std::array<int, 3>> boundary;  // (va, vb, outer neighbor)
  std::unordered_set<int> in_cavity;
  int hint = 0;

  for (int p = 0; p < n; ++p) {
    const Eigen::Vector2d& q = pts_[p];
    const int start = locate(q, hint);
    if (start < 0) throw NumericalError("ScatteredInterpolator: point location failed");

    cavity.clear();
    in_cavity.clear();
    in_cavity.insert(start);
    stack.assign(1, start);
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[t].nbr[e];
        if (nb < 0 || in_cavity.count(nb)) continue;
        const Tri& tn = tris_[nb];
        if (in_circle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], q) > 0.0) {
          in_cavity.insert(nb);
          stack.push_back(nb);
        }
      }
    }

    boundary.clear();
    for (int t : cavity)
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[t].nbr[e];
        if (nb >= 0 && in_cavity.count(nb)) continue;
        boundary.push_back({tris_[t].v[(e + 1) % 3], tris_[t].v[(e + 2) % 3], nb});
      }
    for (int t : cavity) tris_[t].alive = false;

    // fan-connect p to the cavity boundary; triangle t = (p, va, vb)
    const int first_new = static_cast<int>(tris_.size());
    std::unordered_map<int, int> fan_at;  // va -> fan triangle of edge (va, vb)
    for (const auto& [va, vb, outer] : boundary) {
      const int t = static_cast<int>(tris_.size());
      tris_.push_back({{p, va, vb}, {outer, -1, -1}, true});
      if (outer >= 0) {
        Tri& to = tris_[outer];
        for (int e = 0; e < 3; ++e)
          if ((to.v[(e + 1) % 3] == vb && to.v[(e + 2) % 3] == va) ||
              (to.v[(e + 1) % 3] == va && to.v[(e + 2) % 3] == vb))
            to.nbr[e] = t;
      }
      fan_at[va] = t;
    }
    // stitch fan triangles: edge (vb, p) of t meets the fan triangle starting at vb
    for (int t = first_new; t < static_cast<int>(tris_.size()); ++t) {
      const auto it = fan_at.find(tris_[t].v[2]);
      if (it != fan_at.end()) {
        tris_[t].nbr[1] = it->second;   // edge opposite v[1]=va is (vb, p)
        tris_[it->second].nbr[2] = t;   // edge opposite v[2] is (p, va'=vb)
      }
    }
    hint = first_new;
  }

  // drop triangles touching the super-triangle
  for (auto& t : tris_)
    if (t.alive && (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n)) t.alive = false;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    for (int e = 0; e < 3; ++e) {
      const int nb = tris_[t].nbr[e];
      if (nb >= 0 && !tris_[nb].alive) tris_[t].nbr[e] = -1;
    }
    compact_tris_.push_back(t);
  }
  if (compact_tris_.empty())
    throw NumericalError("ScatteredInterpolator: degenerate input (points collinear?)");
  last_hit_ = compact_tris_.front();

  pts_.resize(n);
  vals_.resize(n);
  estimate_gradients();

  // bucket grid for nearest-sample queries
  lo_ = lo;
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  cell_ = span / target;
  nx_ = static_cast<int>((hi.x() - lo.x()) / cell_) + 1;
  ny_ = static_cast<int>((hi.y() - lo.y()) / cell_) + 1;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int i = 0; i < n; ++i) {
    const int bx = std::clamp(static_cast<int>((pts_[i].x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int by = std::clamp(static_cast<int>((pts_[i].y() - lo_.y()) / cell_), 0, ny_ - 1);
    buckets_[static_cast<std::size_t>(by) * nx_ + bx].push_back(i);
  }
}

std::size_t ScatteredInterpolator::triangle_count() const { return compact_tris_.size(); }

int ScatteredInterpolator::locate(const Eigen::Vector2d& q, int hint) const {
  int t = hint;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
    t = -1;
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
      if (tris_[i].alive) {
        t = i;
        break;
      }
    if (t < 0) return -2;
  }
  const int max_steps = static_cast<int>(tris_.size()) + 8;
  for (int step = 0; step < max_steps; ++step) {
    const Tri& tr = tris_[t];
    int next = -1;
    bool hull_exit = false;
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector2d& a = pts_[tr.v[(e + 1) % 3]];
      const Eigen::Vector2d& b = pts_[tr.v[(e + 2) % 3]];
      if (orient(a, b, q) < 0.0) {
        if (tr.nbr[e] >= 0) {
          next = tr.nbr[e];
          break;
        }
        hull_exit = true;
      }
    }
    if (next < 0) return hull_exit ? -2 : t;
    t = next;
  }
  // walk stalled (numerically flat triangles); exhaustive fallback
  for (int tt = 0; tt < static_cast<int>(tris_.size()); ++tt) {
    if (!tris_[tt].alive) continue;
    const Tri& tr = tris_[tt];
    bool inside = true;
    for (int e = 0; e < 3 && inside; ++e)
      if (orient(pts_[tr.v[(e + 1) % 3]], pts_[tr.v[(e + 2) % 3]], q) < -1e-12) inside = false;
    if (inside) return tt;
  }
  return -2;
}

void ScatteredInterpolator::estimate_gradients() {
  const int n = static_cast<int>(pts_.size());
  std::vector<std::vector<int>> ring(n);
  auto add = [&](int a, int b) {
    auto& r = ring[a];
    if (std::find(r.begin(), r.end(), b) == r.end()) r.push_back(b);
  };
  for (int t : compact_tris_) {
    const auto& v = tris_[t].v;
    for (int e = 0; e < 3; ++e) {
      add(v[e], v[(e + 1) % 3]);
      add(v[e], v[(e + 2) % 3]);
    }
  }
  grads_.assign(n, Eigen::Vector2cd::Zero());

  std::vector<int> nbrs;
  for (int i = 0; i < n; ++i) {
    nbrs = ring[i];
    if (nbrs.size() < 6) {  // extend to the 2-ring for a stable quadratic fit
      std::unordered_set<int> have(nbrs.begin(), nbrs.end());
      have.insert(i);
      const std::size_t first = nbrs.size();
      for (std::size_t k = 0; k < first; ++k)
        for (int w : ring[nbrs[k]])
          if (have.insert(w).second) nbrs.push_back(w);
    }
    if (nbrs.empty()) continue;

    // weighted LSQ fit df = g.u + 1/2 u^T H u in coordinates scaled by the
    // median neighbor distance. Scaling plus a weight floor keeps the system
    // conditioned when the ring carries near-coincident or near-collinear
    // samples, so the gradient cannot amplify value noise.
    std::vector<double> dist;
    dist.reserve(nbrs.size());
    for (int j : nbrs) dist.push_back((pts_[j] - pts_[i]).norm());
    std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
    const double h = std::max(dist[dist.size() / 2], 1e-300);

    Eigen::Matrix<double, 5, 5> ata = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 1> atb_re = Eigen::Matrix<double, 5, 1>::Zero();
    Eigen::Matrix<double, 5, 1> atb_im = Eigen::Matrix<double, 5, 1>::Zero();
    for (int j : nbrs) {
      const Eigen::Vector2d u = (pts_[j] - pts_[i]) / h;
      const double w2 = 1.0 / std::max(u.squaredNorm(), 0.0025);  // floored weights
      Eigen::Matrix<double, 5, 1> row;
      row << u.x(), u.y(), 0.5 * u.x() * u.x(), u.x() * u.y(), 0.5 * u.y() * u.y();
      const Complex df = vals_[j] - vals_[i];
      ata += w2 * row * row.transpose();
      atb_re += w2 * row * df.real();
      atb_im += w2 * row * df.imag();
    }
    ata += 1e-8 * std::max(ata.trace(), 1e-300) * Eigen::Matrix<double, 5, 5>::Identity();
    const auto ldlt = ata.ldlt();
    const Eigen::Matrix<double, 5, 1> sre = ldlt.solve(atb_re);
    const Eigen::Matrix<double, 5, 1> sim = ldlt.solve(atb_im);
    grads_[i] = {Complex(sre(0), sim(0)) / h, Complex(sre(1), sim(1)) / h};
  }
}

Complex ScatteredInterpolator::interpolate(const Eigen::Vector2d& q, bool* outside) const {
  if (outside) *outside = false;
  const int t = locate(q, last_hit_);
  if (t < 0) {
    if (outside) *outside = true;
    return Complex(0, 0);
  }
  last_hit_ = t;
  const Tri& tr = tris_[t];
  const Eigen::Vector2d& p0 = pts_[tr.v[0]];
  const Eigen::Vector2d& p1 = pts_[tr.v[1]];
  const Eigen::Vector2d& p2 = pts_[tr.v[2]];
  const double area2 = orient(p0, p1, p2);
  if (std::abs(area2) < 1e-300) return vals_[tr.v[0]];
  const double b0 = orient(p1, p2, q) / area2;
  const double b1 = orient(p2, p0, q) / area2;
  const double b2 = 1.0 - b0 - b1;

  const Complex f0 = vals_[tr.v[0]], f1 = vals_[tr.v[1]], f2 = vals_[tr.v[2]];
  const Eigen::Vector2cd& g0 = grads_[tr.v[0]];
  const Eigen::Vector2cd& g1 = grads_[tr.v[1]];
  const Eigen::Vector2cd& g2 = grads_[tr.v[2]];
  auto dg = [](const Eigen::Vector2cd& g, const Eigen::Vector2d& d) {
    return g(0) * d.x() + g(1) * d.y();
  };

  // cubic Bezier triangle control net from corner values and gradients
  const Complex b300 = f0, b030 = f1, b003 = f2;
  const Complex b210 = f0 + dg(g0, p1 - p0) / 3.0;
  const Complex b201 = f0 + dg(g0, p2 - p0) / 3.0;
  const Complex b120 = f1 + dg(g1, p0 - p1) / 3.0;
  const Complex b021 = f1 + dg(g1, p2 - p1) / 3.0;
  const Complex b102 = f2 + dg(g2, p0 - p2) / 3.0;
  const Complex b012 = f2 + dg(g2, p1 - p2) / 3.0;
  // interior control point set for quadratic precision
  const Complex b111 = 0.25 * (b210 + b201 + b120 + b021 + b102 + b012) -
                       (b300 + b030 + b003) / 6.0;

  return b300 * (b0 * b0 * b0) + b030 * (b1 * b1 * b1) + b003 * (b2 * b2 * b2) +
         3.0 * (b210 * (b0 * b0 * b1) + b201 * (b0 * b0 * b2) + b120 * (b0 * b1 * b1) +
                b021 * (b1 * b1 * b2) + b102 * (b0 * b2 * b2) + b012 * (b1 * b2 * b2)) +
         6.0 * b111 * (b0 * b1 * b2);
}

double ScatteredInterpolator::nearest_distance(const Eigen::Vector2d& q) const {
  // exact within a window of ~cutoff use; far queries report a safe lower bound
  const int bx = static_cast<int>(std::floor((q.x() - lo_.x()) / cell_));
  const int by = static_cast<int>(std::floor((q.y() - lo_.y()) / cell_));
  const int cbx = std::clamp(bx, 0, nx_ - 1);
  const int cby = std::clamp(by, 0, ny_ - 1);
  const int slack = std::max(std::abs(bx - cbx), std::abs(by - cby));
  double best = std::numeric_limits<double>::max();
  const int max_radius = std::max(nx_, ny_) + slack + 2;
  for (int radius = 0; radius <= max_radius; ++radius) {
    for (int y = cby - radius; y <= cby + radius; ++y) {
      if (y < 0 || y >= ny_) continue;
      const bool y_edge = (y == cby - radius || y == cby + radius);
      for (int x = cbx - radius; x <= cbx + radius; ++x) {
        if (x < 0 || x >= nx_) continue;
        if (!y_edge && x != cbx - radius && x != cbx + radius) continue;
        for (int i : buckets_[static_cast<std::size_t>(y) * nx_ + x])
          best = std::min(best, (pts_[i] - q).norm());
      }
    }
    // every unvisited cell is at least this far from q
    if (best <= (radius - slack) * cell_) break;
  }
  return best;
}

}  // namespace darkprobe
