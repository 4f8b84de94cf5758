#include "netstation/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "detail/dense_lp.hpp"

namespace netstation {

namespace {

constexpr double kTight = 1e-9;
constexpr double kRedundant = 1e-8;

// Fixed-size-free bitset for constraint incidence in the double description.
class Incidence {
 public:
  explicit Incidence(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }
  Incidence operator&(const Incidence& other) const {
    Incidence out = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= other.words_[i];
    return out;
  }
  bool subsetOf(const Incidence& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct Ray {
  Eigen::VectorXd direction;
  Incidence tight;
};

bool feasible(const HPolytope& polytope) {
  const auto m = static_cast<Eigen::Index>(polytope.halfSpaces.size());
  Eigen::MatrixXd a(m, polytope.dimension);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i) = polytope.halfSpaces[i].normal.transpose();
    b[i] = -polytope.halfSpaces[i].offset;
  }
  const auto result = detail::maximize(Eigen::VectorXd::Zero(polytope.dimension), a, b);
  return result.status == detail::DenseLpResult::Status::Optimal;
}

void dedupeVertices(std::vector<Eigen::VectorXd>& vertices, double tolerance) {
  std::vector<Eigen::VectorXd> unique;
  for (auto& v : vertices) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Eigen::VectorXd& u) {
      return (u - v).lpNorm<Eigen::Infinity>() <= tolerance;
    });
    if (!seen) unique.push_back(std::move(v));
  }
  vertices = std::move(unique);
}

}  // namespace

HalfSpace HalfSpace::normalized() const {
  const double norm = normal.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("half-space with zero normal");
  return {normal / norm, offset / norm};
}

bool HPolytope::contains(const Eigen::VectorXd& x, double tolerance) const {
  return std::all_of(halfSpaces.begin(), halfSpaces.end(), [&](const HalfSpace& h) {
    return h.evaluate(x) <= tolerance * std::max(1.0, h.normal.norm());
  });
}

HPolytope HPolytope::normalized() const {
  HPolytope out{dimension, {}};
  for (const auto& h : halfSpaces) out.halfSpaces.push_back(h.normalized());
  return out;
}

bool VPolytope::contains(const Eigen::VectorXd& x, double tolerance) const {
  if (vertices.empty()) return false;
  const auto n = static_cast<Eigen::Index>(vertices.size());
  detail::DenseLp lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.rows = Eigen::MatrixXd(dimension + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.rows.block(0, j, dimension, 1) = vertices[j];
    lp.rows(dimension, j) = 1.0;
  }
  lp.rowLower = Eigen::VectorXd(dimension + 1);
  lp.rowUpper = Eigen::VectorXd(dimension + 1);
  lp.rowLower.head(dimension) = x.array() - tolerance;
  lp.rowUpper.head(dimension) = x.array() + tolerance;
  lp.rowLower[dimension] = lp.rowUpper[dimension] = 1.0;
  lp.colLower = Eigen::VectorXd::Zero(n);
  lp.colUpper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  return detail::solveDenseLp(lp).status == detail::DenseLpResult::Status::Optimal;
}

VPolytope enumerateVertices(const HPolytope& polytope) {
  const int d = polytope.dimension;
  const int cone = d + 1;
  std::vector<Eigen::VectorXd> rows;
  {
    Eigen::VectorXd nonNegative = Eigen::VectorXd::Zero(cone);
    nonNegative[d] = -1.0;
    rows.push_back(nonNegative);
  }
  for (const auto& h : polytope.halfSpaces) {
    Eigen::VectorXd row(cone);
    row.head(d) = h.normal;
    row[d] = h.offset;
    const double norm = row.norm();
    if (norm == 0.0) continue;
    rows.push_back(row / norm);
  }
  const std::size_t m = rows.size();

  // Pick d + 1 independent rows to seed a simplicial cone.
  std::vector<std::size_t> basis;
  std::vector<bool> used(m, false);
  Eigen::MatrixXd selected(0, cone);
  for (std::size_t i = 0; i < m && static_cast<int>(basis.size()) < cone; ++i) {
    Eigen::MatrixXd trial(selected.rows() + 1, cone);
    trial << selected, rows[i].transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() == trial.rows()) {
      selected = trial;
      basis.push_back(i);
      used[i] = true;
    }
  }
  if (static_cast<int>(basis.size()) < cone) {
    if (!feasible(polytope)) return {d, {}};
    throw UnboundedPolytope("polytope contains a line");
  }

  const Eigen::MatrixXd generators = -selected.inverse();
  std::vector<Ray> rays;
  for (int j = 0; j < cone; ++j) {
    Ray ray{generators.col(j).normalized(), Incidence(m)};
    for (int k = 0; k < cone; ++k) {
      if (k != j) ray.tight.set(basis[k]);
    }
    rays.push_back(std::move(ray));
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (used[i]) continue;
    const Eigen::VectorXd& g = rows[i];
    std::vector<double> slack(rays.size());
    std::vector<std::size_t> positive, negative;
    std::vector<Ray> next;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      slack[r] = g.dot(rays[r].direction);
      if (slack[r] > kTight) {
        positive.push_back(r);
      } else if (slack[r] < -kTight) {
        negative.push_back(r);
      } else {
        rays[r].tight.set(i);
      }
    }
    for (std::size_t p : positive) {
      for (std::size_t n : negative) {
        const Incidence common = rays[p].tight & rays[n].tight;
        if (static_cast<int>(common.count()) < cone - 2) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r != p && r != n && common.subsetOf(rays[r].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        Eigen::VectorXd combined =
            slack[p] * rays[n].direction - slack[n] * rays[p].direction;
        Ray ray{combined.normalized(), common};
        ray.tight.set(i);
        next.push_back(std::move(ray));
      }
    }
    for (std::size_t r = 0; r < rays.size(); ++r) {
      if (slack[r] <= kTight) next.push_back(std::move(rays[r]));
    }
    rays = std::move(next);
  }

  VPolytope out{d, {}};
  bool recession = false;
  for (const Ray& ray : rays) {
    const double t = ray.direction[d];
    if (t > kTight) {
      out.vertices.push_back(ray.direction.head(d) / t);
    } else {
      recession = true;
    }
  }
  if (out.vertices.empty()) return out;
  if (recession) throw UnboundedPolytope("polytope has a recession direction");
  double scale = 1.0;
  for (const auto& v : out.vertices) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  dedupeVertices(out.vertices, 1e-9 * scale);
  return out;
}

HPolytope removeRedundant(const HPolytope& polytope) {
  HPolytope work{polytope.dimension, {}};
  for (const auto& h : polytope.halfSpaces) {
    if (h.normal.norm() <= 1e-14) {
      if (h.offset > kTight) throw InfeasiblePolytope("contradictory constant half-space");
      continue;
    }
    const HalfSpace n = h.normalized();
    const bool duplicate = std::any_of(work.halfSpaces.begin(), work.halfSpaces.end(),
                                       [&](const HalfSpace& other) {
                                         return (other.normal - n.normal).norm() <= 1e-12 &&
                                                std::abs(other.offset - n.offset) <= 1e-12;
                                       });
    if (!duplicate) work.halfSpaces.push_back(n);
  }
  if (!feasible(work)) throw InfeasiblePolytope("polytope is empty");

  std::vector<HalfSpace> kept = work.halfSpaces;
  std::size_t i = 0;
  while (i < kept.size()) {
    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXd a(m, polytope.dimension);
    Eigen::VectorXd b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      a.row(r) = kept[r].normal.transpose();
      b[r] = -kept[r].offset;
    }
    b[static_cast<Eigen::Index>(i)] += 1.0;  // relaxed copy keeps the LP bounded
    const auto result = detail::maximize(kept[i].normal, a, b);
    const bool redundant = result.status == detail::DenseLpResult::Status::Optimal &&
                           result.objective + kept[i].offset <= kRedundant;
    if (redundant) {
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return {polytope.dimension, std::move(kept)};
}

HPolytope projectOut(const HPolytope& polytope, int coordinate) {
  const int d = polytope.dimension;
  if (coordinate < 0 || coordinate >= d) throw std::out_of_range("projection coordinate");
  auto drop = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(d - 1);
    out << v.head(coordinate), v.tail(d - 1 - coordinate);
    return out;
  };
  std::vector<HalfSpace> positive, negative;
  HPolytope out{d - 1, {}};
  for (const auto& raw : polytope.halfSpaces) {
    const HalfSpace h = raw.normalized();
    const double c = h.normal[coordinate];
    if (c > 1e-12) {
      positive.push_back(h);
    } else if (c < -1e-12) {
      negative.push_back(h);
    } else {
      out.halfSpaces.push_back({drop(h.normal), h.offset});
    }
  }
  for (const auto& p : positive) {
    for (const auto& n : negative) {
      const double cp = p.normal[coordinate];
      const double cn = -n.normal[coordinate];
      const Eigen::VectorXd normal = cn * p.normal + cp * n.normal;
      out.halfSpaces.push_back({drop(normal), cn * p.offset + cp * n.offset});
    }
  }
  return removeRedundant(out);
}

HPolytope projectOut(const HPolytope& polytope, std::vector<int> coordinates) {
  std::sort(coordinates.begin(), coordinates.end(), std::greater<>());
  HPolytope out = polytope;
  for (int c : coordinates) out = projectOut(out, c);
  return out;
}

double Tetrahedron::volume() const {
  Eigen::Matrix3d edges;
  edges << vertices[1] - vertices[0], vertices[2] - vertices[0], vertices[3] - vertices[0];
  return std::abs(edges.determinant()) / 6.0;
}

std::vector<HullFacet> convexHull3(const std::vector<Eigen::Vector3d>& points) {
  const auto n = points.size();
  if (n < 4) throw DegeneratePolytope("fewer than four points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, (p - centroid).norm());
  const double tolerance = 1e-9 * std::max(1.0, scale);

  std::vector<HullFacet> facets;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Eigen::Vector3d normal = (points[j] - points[i]).cross(points[k] - points[i]);
        const double norm = normal.norm();
        if (norm <= tolerance * std::max(1.0, scale)) continue;
        normal /= norm;
        double offset = -normal.dot(points[i]);
        if (normal.dot(centroid) + offset > 0.0) {
          normal = -normal;
          offset = -offset;
        }
        const bool supporting = std::all_of(points.begin(), points.end(), [&](const auto& p) {
          return normal.dot(p) + offset <= tolerance;
        });
        if (!supporting) continue;
        const bool known = std::any_of(facets.begin(), facets.end(), [&](const HullFacet& f) {
          return (f.plane.normal - normal).norm() <= 1e-7 &&
                 std::abs(f.plane.offset - offset) <= 1e-7 * std::max(1.0, scale);
        });
        if (known) continue;
        HullFacet facet{{normal, offset}, {}};
        for (std::size_t v = 0; v < n; ++v) {
          if (std::abs(normal.dot(points[v]) + offset) <= tolerance) {
            facet.vertices.push_back(static_cast<int>(v));
          }
        }
        facets.push_back(std::move(facet));
      }
    }
  }
  if (facets.size() < 4) throw DegeneratePolytope("point set is not full-dimensional");

  for (HullFacet& facet : facets) {
    const Eigen::Vector3d normal = facet.plane.normal;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    for (int v : facet.vertices) center += points[v];
    center /= static_cast<double>(facet.vertices.size());
    const Eigen::Vector3d u = (points[facet.vertices.front()] - center).normalized();
    const Eigen::Vector3d w = normal.cross(u);
    std::sort(facet.vertices.begin(), facet.vertices.end(), [&](int a, int b) {
      const Eigen::Vector3d da = points[a] - center;
      const Eigen::Vector3d db = points[b] - center;
      return std::atan2(da.dot(w), da.dot(u)) < std::atan2(db.dot(w), db.dot(u));
    });
  }
  return facets;
}

std::vector<Tetrahedron> triangulate(const VPolytope& polytope) {
  if (polytope.dimension != 3) throw std::invalid_argument("triangulate expects a 3-D polytope");
  std::vector<Eigen::Vector3d> points;
  for (const auto& v : polytope.vertices) points.emplace_back(v);
  const auto facets = convexHull3(points);
  // Fan from one hull vertex over the facets not containing it.
  const int apexIndex = facets.front().vertices.front();
  const Eigen::Vector3d center = points[apexIndex];

  std::vector<Tetrahedron> out;
  double total = 0.0;
  for (const auto& facet : facets) {
    const auto& ring = facet.vertices;
    if (std::find(ring.begin(), ring.end(), apexIndex) != ring.end()) continue;
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
      Tetrahedron tet{{center, points[ring[0]], points[ring[i]], points[ring[i + 1]]}};
      const double vol = tet.volume();
      if (vol <= 0.0) continue;
      total += vol;
      out.push_back(tet);
    }
  }
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, (p - center).norm());
  if (out.empty() || total <= 1e-12 * scale * scale * scale) {
    throw DegeneratePolytope("polytope has no volume");
  }
  return out;
}

double volume(const VPolytope& polytope) {
  double total = 0.0;
  for (const auto& tet : triangulate(polytope)) total += tet.volume();
  return total;
}

PolytopeSampler::PolytopeSampler(const VPolytope& polytope) : tetrahedra_(triangulate(polytope)) {
  std::vector<double> weights;
  weights.reserve(tetrahedra_.size());
  for (const auto& tet : tetrahedra_) weights.push_back(tet.volume());
  pick_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
}

Eigen::Vector3d PolytopeSampler::operator()(std::mt19937_64& rng) const {
  const Tetrahedron& tet = tetrahedra_[pick_(rng)];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double s = unit(rng);
  double t = unit(rng);
  double u = unit(rng);
  // Fold the unit cube onto the standard simplex.
  if (s + t > 1.0) {
    s = 1.0 - s;
    t = 1.0 - t;
  }
  if (t + u > 1.0) {
    const double tmp = u;
    u = 1.0 - s - t;
    t = 1.0 - tmp;
  } else if (s + t + u > 1.0) {
    const double tmp = u;
    u = s + t + u - 1.0;
    s = 1.0 - t - tmp;
  }
  const auto& v = tet.vertices;
  return v[0] + s * (v[1] - v[0]) + t * (v[2] - v[0]) + u * (v[3] - v[0]);
}

std::vector<Eigen::Vector3d> sampleUniform(const VPolytope& polytope, std::size_t count,
                                           std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  const PolytopeSampler sampler(polytope);
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler(rng));
  return out;
}

Eigen::Vector4d leastSquaresHyperplane(const Eigen::MatrixX3d& points,
                                       const Eigen::VectorXd& values) {
  if (points.rows() < 4 || points.rows() != values.size()) {
    throw std::invalid_argument("need at least four points with one value each");
  }
  Eigen::MatrixX4d design(points.rows(), 4);
  design.col(0).setOnes();
  design.rightCols(3) = points;
  // Column scaling keeps the rank decision meaningful for mixed units.
  const Eigen::Array4d scale = design.colwise().norm().array().max(1e-300);
  const Eigen::MatrixX4d scaled = design * scale.inverse().matrix().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixX4d> qr(scaled);
  qr.setThreshold(1e-12);
  if (qr.rank() < 4) throw std::invalid_argument("design matrix is rank deficient");
  return (qr.solve(values).array() / scale).matrix();
}

std::string describe(const HPolytope& polytope) {
  std::ostringstream out;
  out.precision(17);
  out << "H-polytope dim " << polytope.dimension << ", " << polytope.halfSpaces.size()
      << " half-spaces\n";
  for (const auto& h : polytope.halfSpaces) {
    for (Eigen::Index i = 0; i < h.normal.size(); ++i) out << h.normal[i] << ' ';
    out << "| " << h.offset << '\n';
  }
  return out.str();
}

std::string describe(const VPolytope& polytope) {
  std::ostringstream out;
  out.precision(17);
  out << "V-polytope dim " << polytope.dimension << ", " << polytope.vertices.size()
      << " vertices\n";
  for (const auto& v : polytope.vertices) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace netstation
