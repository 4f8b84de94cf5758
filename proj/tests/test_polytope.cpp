#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "netstation/polytope.hpp"
#include "oracles.hpp"

using namespace netstation;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

HPolytope unitCube() { return oracle::box({{0, 1}, {0, 1}, {0, 1}}); }

HPolytope unitSimplex(int dimension) {
  HPolytope h;
  h.dimension = dimension;
  for (int i = 0; i < dimension; ++i) {
    VectorXd n = VectorXd::Zero(dimension);
    n[i] = -1.0;
    h.halfSpaces.push_back({n, 0.0});
  }
  h.halfSpaces.push_back({VectorXd::Ones(dimension), -1.0});
  return h;
}

VPolytope asV(const std::vector<VectorXd>& vertices) {
  VPolytope v;
  v.dimension = static_cast<int>(vertices.front().size());
  v.vertices = vertices;
  return v;
}

std::vector<Vector3d> as3(const std::vector<VectorXd>& vertices) {
  std::vector<Vector3d> out;
  for (const auto& v : vertices) out.emplace_back(v[0], v[1], v[2]);
  return out;
}

}  // namespace

TEST_CASE("vertex enumeration") {
  CHECK(enumerateVertices(unitCube()).vertices.size() == 8);
  CHECK(enumerateVertices(unitSimplex(3)).vertices.size() == 4);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const HPolytope h = oracle::randomPolytope(3, 6, rng);
    const auto got = enumerateVertices(h).vertices;
    const auto expected = oracle::bruteVertices(h);
    CHECK(got.size() == expected.size());
    CHECK(oracle::vertexHausdorff(got, expected) < 1e-7);
  }

  HPolytope empty = unitCube();
  empty.halfSpaces.push_back({Vector3d(1, 0, 0), 2.0});  // x <= -2
  CHECK(enumerateVertices(empty).vertices.empty());

  HPolytope open = unitCube();
  open.halfSpaces.erase(open.halfSpaces.begin());  // drop x <= 1
  CHECK_THROWS_AS(enumerateVertices(open), UnboundedPolytope);
}

TEST_CASE("redundancy removal") {
  HPolytope duplicated = unitCube();
  duplicated.halfSpaces.push_back(duplicated.halfSpaces.front());
  duplicated.halfSpaces.push_back({2.0 * duplicated.halfSpaces[2].normal,
                                   2.0 * duplicated.halfSpaces[2].offset});
  CHECK(removeRedundant(duplicated).halfSpaces.size() == 6);

  HPolytope slack = unitCube();
  slack.halfSpaces.push_back({Vector3d(1, 0, 0), -2.0});
  CHECK(removeRedundant(slack).halfSpaces.size() == 6);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HPolytope h = oracle::randomPolytope(3, 8, rng);
    const HPolytope reduced = removeRedundant(h);
    CHECK(reduced.halfSpaces.size() <= h.halfSpaces.size());
    CHECK(oracle::vertexHausdorff(oracle::bruteVertices(reduced), oracle::bruteVertices(h)) < 1e-7);
  }
}

TEST_CASE("projection") {
  const HPolytope square = projectOut(unitCube(), 2);
  CHECK(square.dimension == 2);
  CHECK(square.halfSpaces.size() == 4);
  CHECK(oracle::vertexHausdorff(oracle::bruteVertices(square),
                                oracle::bruteVertices(oracle::box({{0, 1}, {0, 1}}))) < 1e-12);

  const HPolytope lower = projectOut(unitSimplex(3), 2);
  CHECK(oracle::vertexHausdorff(oracle::bruteVertices(lower),
                                oracle::bruteVertices(unitSimplex(2))) < 1e-12);

  const HPolytope line = projectOut(unitCube(), std::vector<int>{0, 2});
  CHECK(line.dimension == 1);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const HPolytope h = oracle::randomPolytope(4, 6, rng);
    std::vector<Vector3d> shadow;
    for (const auto& v : oracle::bruteVertices(h)) shadow.emplace_back(v[0], v[1], v[2]);
    const auto expected = oracle::hullVertices3(shadow);
    const auto got = oracle::bruteVertices(projectOut(h, 3));
    CHECK(oracle::vertexHausdorff(got, expected) < 1e-7);
  }
}

TEST_CASE("triangulation and volume") {
  const Tetrahedron unit{{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(0, 1, 0), Vector3d(0, 0, 1)}};
  CHECK(unit.volume() == doctest::Approx(1.0 / 6.0));
  const VPolytope simplex = asV({VectorXd(Vector3d(0, 0, 0)), VectorXd(Vector3d(1, 0, 0)),
                                 VectorXd(Vector3d(0, 1, 0)), VectorXd(Vector3d(0, 0, 1))});
  const auto pieces = triangulate(simplex);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].volume() == doctest::Approx(1.0 / 6.0));

  const VPolytope cube = enumerateVertices(unitCube());
  double sum = 0.0;
  for (const auto& piece : triangulate(cube)) sum += piece.volume();
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(volume(cube) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const VPolytope v = enumerateVertices(oracle::randomPolytope(3, 5, rng));
    const double expected = oracle::surfaceVolume(as3(v.vertices));
    CHECK(std::abs(volume(v) - expected) <= 1e-9 * std::max(1.0, expected));
  }
}

TEST_CASE("convex hull facets") {
  const auto facets = convexHull3(as3(enumerateVertices(unitCube()).vertices));
  CHECK(facets.size() == 6);
  for (const auto& f : facets) CHECK(f.vertices.size() == 4);
}

TEST_CASE("uniform sampling") {
  const VPolytope tetra = asV({VectorXd(Vector3d(0, 0, 0)), VectorXd(Vector3d(1, 0, 0)),
                               VectorXd(Vector3d(0, 1, 0)), VectorXd(Vector3d(0, 0, 1))});
  const auto points = sampleUniform(tetra, 10000, 42);
  Vector3d mean = Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= 10000.0;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - 0.25) < 0.02);

  // Kolmogorov-Smirnov per coordinate on a box, alpha = 0.01.
  const HPolytope boxH = oracle::box({{-1, 2}, {0, 0.5}, {3, 7}});
  const std::array<std::pair<double, double>, 3> ranges{{{-1, 2}, {0, 0.5}, {3, 7}}};
  const std::size_t n = 5000;
  const auto samples = sampleUniform(enumerateVertices(boxH), n, 7);
  for (int i = 0; i < 3; ++i) {
    std::vector<double> x;
    for (const auto& p : samples) x.push_back(p[i]);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f = (x[k] - ranges[i].first) / (ranges[i].second - ranges[i].first);
      d = std::max({d, std::abs(f - static_cast<double>(k) / n),
                    std::abs(f - static_cast<double>(k + 1) / n)});
    }
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
  }
  for (const auto& p : samples) CHECK(boxH.contains(p, 1e-12));

  CHECK(sampleUniform(tetra, 1, 99).front() == sampleUniform(tetra, 1, 99).front());
  CHECK(sampleUniform(tetra, 50, 1) != sampleUniform(tetra, 50, 2));
}

TEST_CASE("least-squares hyperplane") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  Eigen::MatrixX3d pts(40, 3);
  for (int r = 0; r < 40; ++r) pts.row(r) = Eigen::RowVector3d(u(rng), u(rng), u(rng));

  const Eigen::Vector4d truth(1.5, -2.0, 0.25, 3.0);
  Eigen::VectorXd exact(40);
  for (int r = 0; r < 40; ++r) exact[r] = truth[0] + pts.row(r).dot(truth.tail<3>());
  const Eigen::Vector4d fit = leastSquaresHyperplane(pts, exact);
  CHECK((fit - truth).norm() < 1e-10);

  const Eigen::Vector4d flat = leastSquaresHyperplane(pts, Eigen::VectorXd::Constant(40, 4.0));
  CHECK((flat - Eigen::Vector4d(4, 0, 0, 0)).norm() < 1e-10);

  Eigen::VectorXd noisy(40);
  for (int r = 0; r < 40; ++r) noisy[r] = u(rng);
  Eigen::MatrixXd design(40, 4);
  design.col(0).setOnes();
  design.rightCols<3>() = pts;
  const Eigen::Vector4d normal =
      (design.transpose() * design).ldlt().solve(design.transpose() * noisy);
  CHECK((leastSquaresHyperplane(pts, noisy) - normal).norm() < 1e-8);
}

TEST_CASE("membership") {
  const HPolytope cube = unitCube();
  CHECK(cube.contains(Vector3d(0.5, 0.5, 0.5)));
  CHECK_FALSE(cube.contains(Vector3d(1.1, 0.5, 0.5)));
  const VPolytope v = enumerateVertices(cube);
  CHECK(v.contains(Vector3d(0.2, 0.9, 0.1)));
  CHECK_FALSE(v.contains(Vector3d(-0.1, 0.9, 0.1)));
  CHECK_THROWS_AS((HalfSpace{Vector3d::Zero(), 1.0}.normalized()), std::invalid_argument);
}
