#ifndef DARKPROBE_SCATTER_HPP
#define DARKPROBE_SCATTER_HPP

#include <vector>

#include "darkprobe/linalg.hpp"

namespace darkprobe {

// Scattered bivariate interpolation: Bowyer-Watson Delaunay triangulation
// with per-triangle cubic Bezier patches (Clough-Tocher style). Vertex
// gradients come from a weighted least-squares quadratic fit over the
// triangulation neighborhood, so the interpolant captures curvature that
// a linear scheme misses. Values on a shared edge depend only on the edge
// endpoints, hence the surface is continuous.
class ScatteredInterpolator {
 public:
  // points and values in matching order; near-duplicate points (within
  // 1e-9 * bounding-box diagonal) are merged, first value wins
  ScatteredInterpolator(const std::vector<Eigen::Vector2d>& points,
                        const std::vector<Complex>& values);

  // cubic interpolation at q; sets *outside = true (and returns 0) for
  // queries outside the convex hull
  Complex interpolate(const Eigen::Vector2d& q, bool* outside = nullptr) const;

  // distance from q to the nearest sample point
  double nearest_distance(const Eigen::Vector2d& q) const;

  std::size_t vertex_count() const { return pts_.size(); }
  std::size_t triangle_count() const;

 private:
  struct Tri {
    int v[3];
    int nbr[3];  // neighbor opposite vertex i; -1 = hull
    bool alive = true;
  };

  int locate(const Eigen::Vector2d& q, int hint) const;
  void estimate_gradients();

  std::vector<Eigen::Vector2d> pts_;
  std::vector<Complex> vals_;
  std::vector<Eigen::Vector2cd> grads_;
  std::vector<Tri> tris_;
  std::vector<int> compact_tris_;  // indices of alive triangles
  mutable int last_hit_ = 0;

  // uniform bucket grid for nearest-sample queries
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  Eigen::Vector2d lo_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace darkprobe

#endif
