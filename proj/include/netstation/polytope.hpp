#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Small-dimensional polytope toolkit. Half-spaces read a . x + b <= 0.

namespace netstation {

struct HalfSpace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  double evaluate(const Eigen::VectorXd& x) const { return normal.dot(x) + offset; }
  /// Scaled to a unit normal. Throws std::invalid_argument on a zero normal.
  HalfSpace normalized() const;
};

struct HPolytope {
  int dimension = 0;
  std::vector<HalfSpace> halfSpaces;

  bool contains(const Eigen::VectorXd& x, double tolerance = 1e-9) const;
  HPolytope normalized() const;
};

struct VPolytope {
  int dimension = 0;
  std::vector<Eigen::VectorXd> vertices;

  /// Convex-hull membership, decided by a small LP.
  bool contains(const Eigen::VectorXd& x, double tolerance = 1e-9) const;
};

class InfeasiblePolytope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundedPolytope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneratePolytope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Double description on the homogenized cone. Returns no vertices for an
/// empty polytope; throws UnboundedPolytope when a recession direction exists.
VPolytope enumerateVertices(const HPolytope& polytope);

/// Keeps only facet-defining half-spaces (normalized). One LP per candidate.
HPolytope removeRedundant(const HPolytope& polytope);

/// Fourier-Motzkin elimination of one coordinate followed by removeRedundant.
HPolytope projectOut(const HPolytope& polytope, int coordinate);
HPolytope projectOut(const HPolytope& polytope, std::vector<int> coordinates);

struct Tetrahedron {
  std::array<Eigen::Vector3d, 4> vertices;
  double volume() const;
};

/// Facets of the hull of a full-dimensional 3-D point set, with their vertex
/// indices in counter-clockwise order seen from outside.
struct HullFacet {
  HalfSpace plane;
  std::vector<int> vertices;
};
std::vector<HullFacet> convexHull3(const std::vector<Eigen::Vector3d>& points);

std::vector<Tetrahedron> triangulate(const VPolytope& polytope);
double volume(const VPolytope& polytope);

/// Uniform sampler over a full-dimensional 3-D polytope: a tetrahedron is drawn
/// with probability proportional to its volume, then a point inside it by
/// folding a unit-cube sample.
class PolytopeSampler {
 public:
  explicit PolytopeSampler(const VPolytope& polytope);

  Eigen::Vector3d operator()(std::mt19937_64& rng) const;
  const std::vector<Tetrahedron>& tetrahedra() const { return tetrahedra_; }

 private:
  std::vector<Tetrahedron> tetrahedra_;
  mutable std::discrete_distribution<std::size_t> pick_;
};

std::vector<Eigen::Vector3d> sampleUniform(const VPolytope& polytope, std::size_t count,
                                           std::uint64_t seed);

/// Least squares fit values ~ a0 + a1 x + a2 y + a3 z over the rows of `points`.
Eigen::Vector4d leastSquaresHyperplane(const Eigen::MatrixX3d& points,
                                       const Eigen::VectorXd& values);

std::string describe(const HPolytope& polytope);
std::string describe(const VPolytope& polytope);

}  // namespace netstation
