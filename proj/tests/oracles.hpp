#pragma once

// Reference computations for the tests. Everything here is brute force and
// shares no code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "netstation/network.hpp"
#include "netstation/polytope.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline constexpr double kTol = 1e-9;

// --- scalar physics --------------------------------------------------------

inline double friction(double d, double k) {
  const double s = 2.0 * std::log10(d / k) + 1.138;
  return std::pow(s, -2.0);
}

inline double papay(double pBar, double pc, double T, double Tc) {
  const double pr = pBar / pc;
  const double tr = T / Tc;
  return 1.0 - 3.52 * pr * std::exp(-2.26 * tr) + 0.247 * pr * pr * std::exp(-1.878 * tr);
}

inline double head(double ratio, double z, double Rs, double T, double kappa) {
  return z * T * Rs * kappa / (kappa - 1.0) * (std::pow(ratio, (kappa - 1.0) / kappa) - 1.0);
}

inline double power(double q, double pl, double pr, double z, double eta, double Rs, double T,
                    double kappa) {
  return q * head(pr / pl, z, Rs, T, kappa) / eta;
}

// --- polytopes ---------------------------------------------------------------

/// Rows of a·x <= b from half-spaces n·x + c <= 0.
struct Inequalities {
  MatrixXd a;
  VectorXd b;
};

inline Inequalities toInequalities(const netstation::HPolytope& h) {
  Inequalities out;
  const auto m = static_cast<Eigen::Index>(h.halfSpaces.size());
  out.a.resize(m, h.dimension);
  out.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& hs = h.halfSpaces[static_cast<std::size_t>(i)];
    const double scale = hs.normal.norm();
    out.a.row(i) = hs.normal.transpose() / scale;
    out.b[i] = -hs.offset / scale;
  }
  return out;
}

inline void addUnique(std::vector<VectorXd>& points, const VectorXd& p, double tol = 1e-7) {
  for (const auto& q : points) {
    if ((q - p).norm() <= tol) return;
  }
  points.push_back(p);
}

/// All feasible intersections of d linearly independent constraint planes.
inline std::vector<VectorXd> bruteVertices(const Inequalities& ineq, double tol = 1e-8) {
  const auto m = static_cast<int>(ineq.a.rows());
  const auto d = static_cast<int>(ineq.a.cols());
  std::vector<VectorXd> out;
  std::vector<int> pick(d);
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == d) {
      MatrixXd sub(d, d);
      VectorXd rhs(d);
      for (int k = 0; k < d; ++k) {
        sub.row(k) = ineq.a.row(pick[k]);
        rhs[k] = ineq.b[pick[k]];
      }
      Eigen::FullPivLU<MatrixXd> lu(sub);
      if (lu.rank() < d) return;
      const VectorXd x = lu.solve(rhs);
      if (((ineq.a * x - ineq.b).array() <= tol).all()) addUnique(out, x);
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return out;
}

inline std::vector<VectorXd> bruteVertices(const netstation::HPolytope& h) {
  return bruteVertices(toInequalities(h));
}

/// Upper bound on the Hausdorff distance of two convex hulls from their
/// vertex sets; infinite if one side is empty and the other is not.
inline double vertexHausdorff(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b) {
  if (a.empty() != b.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto oneWay = [&](const std::vector<VectorXd>& from, const std::vector<VectorXd>& to) {
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
  };
  oneWay(a, b);
  oneWay(b, a);
  return worst;
}

/// Andrew's monotone chain; strictly convex output.
inline std::vector<VectorXd> hull2(std::vector<VectorXd> pts) {
  std::sort(pts.begin(), pts.end(), [](const VectorXd& p, const VectorXd& q) {
    return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
  });
  auto cross = [](const VectorXd& o, const VectorXd& a, const VectorXd& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  if (pts.size() < 3) return pts;
  std::vector<VectorXd> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

struct BruteFacet {
  Vector3d normal;  // outward, unit
  double level = 0.0;  // normal . x <= level
  std::vector<int> members;
};

/// Supporting planes through point triples with every point on one side.
inline std::vector<BruteFacet> bruteHull3(const std::vector<Vector3d>& pts, double tol = 1e-9) {
  std::vector<BruteFacet> facets;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Vector3d nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (nrm.norm() < 1e-12) continue;
        nrm.normalize();
        double level = nrm.dot(pts[i]);
        int above = 0;
        int below = 0;
        for (const auto& p : pts) {
          const double s = nrm.dot(p) - level;
          if (s > tol) ++above;
          if (s < -tol) ++below;
        }
        if (above > 0 && below > 0) continue;
        if (above > 0) {
          nrm = -nrm;
          level = -level;
        }
        bool seen = false;
        for (const auto& f : facets) {
          if ((f.normal - nrm).norm() < 1e-9 && std::abs(f.level - level) < 1e-9) seen = true;
        }
        if (seen) continue;
        BruteFacet f{nrm, level, {}};
        for (int m = 0; m < n; ++m) {
          if (std::abs(nrm.dot(pts[m]) - level) <= tol) f.members.push_back(m);
        }
        facets.push_back(std::move(f));
      }
    }
  }
  return facets;
}

/// Points on facets whose normals span three dimensions.
inline std::vector<VectorXd> hullVertices3(const std::vector<Vector3d>& pts) {
  const auto facets = bruteHull3(pts);
  std::vector<VectorXd> out;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    MatrixXd normals(0, 3);
    for (const auto& f : facets) {
      if (std::find(f.members.begin(), f.members.end(), i) == f.members.end()) continue;
      normals.conservativeResize(normals.rows() + 1, 3);
      normals.row(normals.rows() - 1) = f.normal.transpose();
    }
    if (normals.rows() >= 3 && Eigen::FullPivLU<MatrixXd>(normals).rank() == 3) {
      addUnique(out, pts[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

/// Divergence theorem: V = 1/3 sum over facets of level * area.
inline double surfaceVolume(const std::vector<Vector3d>& pts) {
  double volume = 0.0;
  for (const auto& f : bruteHull3(pts)) {
    // Order the member points by angle about the facet centroid.
    Vector3d centroid = Vector3d::Zero();
    for (int m : f.members) centroid += pts[m];
    centroid /= static_cast<double>(f.members.size());
    const Vector3d u = (pts[f.members.front()] - centroid).normalized();
    const Vector3d v = f.normal.cross(u);
    std::vector<std::pair<double, int>> ring;
    for (int m : f.members) {
      const Vector3d r = pts[m] - centroid;
      ring.emplace_back(std::atan2(r.dot(v), r.dot(u)), m);
    }
    std::sort(ring.begin(), ring.end());
    double area = 0.0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const Vector3d& a = pts[ring[k].second];
      const Vector3d& b = pts[ring[(k + 1) % ring.size()].second];
      area += 0.5 * (a - centroid).cross(b - centroid).dot(f.normal);
    }
    volume += f.level * area / 3.0;
  }
  return volume;
}

/// Bounded random polytope: a box of half-width 3 cut by `cuts` random planes
/// at distance 0.5..1.5 from the origin.
inline netstation::HPolytope randomPolytope(int dimension, int cuts, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  netstation::HPolytope h;
  h.dimension = dimension;
  for (int i = 0; i < dimension; ++i) {
    for (double s : {1.0, -1.0}) {
      VectorXd n = VectorXd::Zero(dimension);
      n[i] = s;
      h.halfSpaces.push_back({n, -3.0});
    }
  }
  for (int c = 0; c < cuts; ++c) {
    VectorXd n(dimension);
    for (int i = 0; i < dimension; ++i) n[i] = gauss(rng);
    n.normalize();
    h.halfSpaces.push_back({n, -dist(rng)});
  }
  return h;
}

inline netstation::HPolytope box(const std::vector<std::pair<double, double>>& ranges) {
  netstation::HPolytope h;
  h.dimension = static_cast<int>(ranges.size());
  for (int i = 0; i < h.dimension; ++i) {
    VectorXd up = VectorXd::Zero(h.dimension);
    up[i] = 1.0;
    h.halfSpaces.push_back({up, -ranges[static_cast<std::size_t>(i)].second});
    h.halfSpaces.push_back({-up, ranges[static_cast<std::size_t>(i)].first});
  }
  return h;
}

/// Vertex set of the parallel combination: shared (pl, pr), flows summed.
/// Built from the product polytope in (pl, pr, q_1..q_k).
inline std::vector<VectorXd> parallelOracle(const std::vector<netstation::HPolytope>& units) {
  const int k = static_cast<int>(units.size());
  const int dim = 2 + k;
  Inequalities ineq;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int u = 0; u < k; ++u) {
    const Inequalities part = toInequalities(units[static_cast<std::size_t>(u)]);
    for (Eigen::Index r = 0; r < part.a.rows(); ++r) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
      row[0] = part.a(r, 0);
      row[1] = part.a(r, 1);
      row[2 + u] = part.a(r, 2);
      rows.push_back(row);
      rhs.push_back(part.b[r]);
    }
  }
  ineq.a.resize(static_cast<Eigen::Index>(rows.size()), dim);
  ineq.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ineq.a.row(static_cast<Eigen::Index>(r)) = rows[r];
    ineq.b[static_cast<Eigen::Index>(r)] = rhs[r];
  }
  std::vector<Vector3d> projected;
  for (const auto& v : bruteVertices(ineq)) {
    projected.emplace_back(v[0], v[1], v.tail(k).sum());
  }
  return hullVertices3(projected);
}

/// Vertex set of a series chain in (pl, pr, q) from the product over
/// (p_0, p_1, ..., p_n, q) with stage s acting on (p_s, p_{s+1}, q).
inline std::vector<VectorXd> seriesOracle(const std::vector<netstation::HPolytope>& stages) {
  const int n = static_cast<int>(stages.size());
  const int dim = n + 2;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int s = 0; s < n; ++s) {
    const Inequalities part = toInequalities(stages[static_cast<std::size_t>(s)]);
    for (Eigen::Index r = 0; r < part.a.rows(); ++r) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
      row[s] = part.a(r, 0);
      row[s + 1] = part.a(r, 1);
      row[dim - 1] = part.a(r, 2);
      rows.push_back(row);
      rhs.push_back(part.b[r]);
    }
  }
  Inequalities ineq;
  ineq.a.resize(static_cast<Eigen::Index>(rows.size()), dim);
  ineq.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ineq.a.row(static_cast<Eigen::Index>(r)) = rows[r];
    ineq.b[static_cast<Eigen::Index>(r)] = rhs[r];
  }
  std::vector<Vector3d> projected;
  for (const auto& v : bruteVertices(ineq)) projected.emplace_back(v[0], v[n], v[dim - 1]);
  return hullVertices3(projected);
}

// --- transition times --------------------------------------------------------

/// Each change at instant c from mode A to B blocks [c - theta/2, c + theta/2).
/// The sequence works iff each blocked interval starts no earlier than every
/// earlier one ends (instantaneous changes included), no interval
/// reaches before delta_0, and the last change may run past the horizon.
inline bool intervalsDisjoint(const std::vector<int>& modes, const std::vector<double>& grid,
                              const std::vector<std::vector<double>>& theta) {
  struct Interval {
    double begin, end;
  };
  std::vector<Interval> blocked;
  for (std::size_t t = 1; t < modes.size(); ++t) {
    if (modes[t] == modes[t - 1]) continue;
    const double half = theta[modes[t - 1]][modes[t]] / 2.0;
    blocked.push_back({grid[t] - half, grid[t] + half});
  }
  const double slack = 1e-9;
  if (!blocked.empty() && blocked.front().begin < grid.front() - slack) return false;
  // A later switch, even an instantaneous one, may not start while an earlier
  // transition is still running.
  for (std::size_t i = 0; i < blocked.size(); ++i) {
    for (std::size_t j = i + 1; j < blocked.size(); ++j) {
      if (blocked[j].begin < blocked[i].end - slack) return false;
    }
  }
  return true;
}

/// Reachability over (time position, mode): after entering `newMode` at t
/// from `oldMode`, can the station leave `newMode` before its first outage?
/// `available(m, s)` abstracts the outage calendar.
inline bool escapeExists(std::size_t t, int newMode, int oldMode, const std::vector<double>& grid,
                         const std::vector<std::vector<double>>& theta,
                         const std::function<bool(int, std::size_t)>& available) {
  std::size_t dead = grid.size();
  for (std::size_t s = t + 1; s < grid.size(); ++s) {
    if (!available(newMode, s)) {
      dead = s;
      break;
    }
  }
  if (dead == grid.size()) return true;
  const double entered = newMode == oldMode ? 0.0 : theta[oldMode][newMode] / 2.0;
  for (std::size_t s = t + 1; s <= dead; ++s) {
    for (int m = 0; m < static_cast<int>(theta.size()); ++m) {
      if (m == newMode || !available(m, s)) continue;
      // Leaving at position s: the current phase lasts grid[s] - grid[t].
      if (entered + theta[newMode][m] / 2.0 <= grid[s] - grid[t] + 1e-9) return true;
    }
  }
  return false;
}

}  // namespace oracle
