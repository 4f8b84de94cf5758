// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netstation/algorithm.hpp"
#include "netstation/compressor_ranges.hpp"
#include "netstation/io.hpp"
#include "netstation/physics.hpp"
#include "netstation/polytope.hpp"
#include "netstation/solver.hpp"
#include "netstation/units.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netstation;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double relative(double got, double expected) {
  if (got == expected) return 0.0;
  return std::abs(got - expected) / std::max(std::abs(expected), 1e-300);
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

// 1 ---------------------------------------------------------------------------

Outcome geometry() {
  Outcome out;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  double worstHausdorff = 0.0;
  double worstVolume = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HPolytope polytope = oracle::randomPolytope(3, 4 + trial % 5, rng);
    const auto vertices3 = oracle::bruteVertices(polytope);
    for (int coordinate = 0; coordinate < 3; ++coordinate) {
      std::vector<VectorXd> shadow;
      for (const auto& v : vertices3) {
        VectorXd p(2);
        int k = 0;
        for (int i = 0; i < 3; ++i)
          if (i != coordinate) p[k++] = v[i];
        shadow.push_back(p);
      }
      const auto expected = oracle::hull2(shadow);
      const auto got = oracle::bruteVertices(projectOut(polytope, coordinate));
      worstHausdorff = std::max(worstHausdorff, oracle::vertexHausdorff(got, expected));
    }
    const VPolytope v = enumerateVertices(polytope);
    std::vector<Vector3d> points;
    for (const auto& p : v.vertices) points.emplace_back(p);
    const double reference = oracle::surfaceVolume(points);
    worstVolume = std::max(worstVolume, std::abs(volume(v) - reference) / std::max(1.0, reference));
  }
  const double elapsed = seconds(start);
  out.require(worstHausdorff <= 1e-7, "projection Hausdorff distance too large");
  out.require(worstVolume <= 1e-9, "volume mismatch");
  out.require(elapsed < 60.0, "too slow");
  std::ostringstream detail;
  detail << "hausdorff " << worstHausdorff << ", volume " << worstVolume << ", " << elapsed << " s";
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 2 ---------------------------------------------------------------------------

struct CellTest {
  double chiSquare = 0.0;
  double worstSigma = 0.0;
};

CellTest cells(const VPolytope& polytope, const HPolytope& region,
               const std::function<int(const Vector3d&)>& cellOf, std::uint64_t seed) {
  constexpr std::size_t n = 50000;
  constexpr int k = 8;
  std::array<double, k> counts{};
  for (const auto& p : sampleUniform(polytope, n, seed)) counts[cellOf(p)] += 1.0;
  CellTest out;
  for (double c : counts) out.chiSquare += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);

  // Rejection sampler over the bounding box.
  Vector3d lo = polytope.vertices.front(), hi = polytope.vertices.front();
  for (const auto& v : polytope.vertices) {
    lo = lo.cwiseMin(Vector3d(v));
    hi = hi.cwiseMax(Vector3d(v));
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::array<double, k> reference{};
  std::size_t accepted = 0;
  while (accepted < n) {
    Vector3d p;
    for (int i = 0; i < 3; ++i) p[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    if (!region.contains(p, 0.0)) continue;
    reference[cellOf(p)] += 1.0;
    ++accepted;
  }
  for (int c = 0; c < k; ++c) {
    const double a = counts[c] / n;
    const double b = reference[c] / n;
    const double pooled = 0.5 * (a + b);
    const double sigma = std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
    out.worstSigma = std::max(out.worstSigma, std::abs(a - b) / sigma);
  }
  return out;
}

Outcome sampling() {
  Outcome out;
  constexpr double critical = 18.475;  // chi-square, 7 degrees of freedom, alpha 0.01

  const HPolytope box = oracle::box({{-1, 3}, {0, 2}, {10, 11}});
  const CellTest boxTest = cells(enumerateVertices(box), box, [](const Vector3d& p) {
    return (p[0] > 1 ? 1 : 0) + (p[1] > 1 ? 2 : 0) + (p[2] > 10.5 ? 4 : 0);
  }, 101);

  HPolytope simplex{3, {}};
  for (int i = 0; i < 3; ++i) {
    VectorXd n = VectorXd::Zero(3);
    n[i] = -1.0;
    simplex.halfSpaces.push_back({n, 0.0});
  }
  simplex.halfSpaces.push_back({VectorXd::Ones(3), -1.0});
  // Shells between scaled copies s T with equal volume: s_k = (k/8)^(1/3).
  const CellTest simplexTest = cells(enumerateVertices(simplex), simplex, [](const Vector3d& p) {
    const double s = p.sum();
    const int cell = static_cast<int>(std::floor(8.0 * s * s * s));
    return std::clamp(cell, 0, 7);
  }, 202);

  out.require(boxTest.chiSquare < critical, "box fails chi-square");
  out.require(simplexTest.chiSquare < critical, "simplex fails chi-square");
  out.require(boxTest.worstSigma <= 3.0, "box cells differ from rejection sampler");
  out.require(simplexTest.worstSigma <= 3.0, "simplex cells differ from rejection sampler");
  std::ostringstream detail;
  detail << "chi2 box " << boxTest.chiSquare << ", simplex " << simplexTest.chiSquare
         << " (< " << critical << "); rejection deviation " << boxTest.worstSigma << " / "
         << simplexTest.worstSigma << " sigma";
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 3 ---------------------------------------------------------------------------

GasConstants naturalGas() {
  GasConstants gas;
  gas.specificGasConstant = 518.28;
  gas.temperature = 283.15;
  gas.pseudoCriticalPressureBar = 46.5;
  gas.pseudoCriticalTemperature = 190.6;
  gas.normalDensity = 0.785;
  return gas;
}

Outcome physics() {
  Outcome out;
  double worst = 0.0;
  auto against = [&](double got, double expected, const std::string& what) {
    const double r = relative(got, expected);
    worst = std::max(worst, r);
    out.require(r <= 1e-9, what);
  };
  GasConstants gas = naturalGas();

  const double ratio = std::pow(10.0, (1.0 / std::sqrt(0.02) - 1.138) / 2.0);
  against(nikuradseFriction(ratio, 1.0), 0.02, "friction inversion");
  against(nikuradseFriction(1.0, 0.001), oracle::friction(1.0, 0.001), "friction D=1 k=0.001");
  out.require(std::abs(nikuradseFriction(1.0, 0.001) - 0.019627) < 5e-7, "friction hand value");
  out.require(nikuradseFriction(1.0, 0.01) > nikuradseFriction(1.0, 0.001), "friction monotone");

  out.require(papayZ(0.0, gas).z == 1.0, "papay at zero");
  GasConstants critical = gas;
  critical.temperature = critical.pseudoCriticalTemperature;
  against(papayZ(46.5, critical).z, oracle::papay(46.5, 46.5, 190.6, 190.6), "papay critical");
  out.require(std::abs(papayZ(46.5, critical).z - 0.67045) < 5e-6, "papay hand value");
  const double p = units::barToPa(55.0);
  against(pipeZ(p, p, gas), papayZ(55.0, gas).z, "pipe z symmetry");

  out.require(adiabaticHead(1.0, 0.9, gas) == 0.0, "head at ratio 1");
  against(adiabaticHead(1.5, 0.9, gas), oracle::head(1.5, 0.9, 518.28, 283.15, 1.296), "head 1.5");
  for (double r : {1.0001, 1.2, 1.5, 2.0, 3.0}) {
    against(pressureRatioFromHead(adiabaticHead(r, 0.9, gas), 0.9, gas), r, "head inverse");
  }

  const double pl = units::barToPa(45.0);
  const double pr = units::barToPa(60.0);
  out.require(compressionPower(0.0, pl, pr, 0.9, 0.8, gas) == 0.0, "power at zero flow");
  out.require(compressionPower(40.0, pl, pl, 0.9, 0.8, gas) == 0.0, "power at equal pressures");
  against(compressionPower(40.0, pl, pr, 0.9, 0.8, gas),
          oracle::power(40.0, pl, pr, 0.9, 0.8, 518.28, 283.15, 1.296), "power");
  against(compressionPower(80.0, pl, pr, 0.9, 0.8, gas),
          2.0 * compressionPower(40.0, pl, pr, 0.9, 0.8, gas), "power linear in flow");

  std::ostringstream detail;
  detail << "worst relative error " << worst;
  if (out.pass) out.detail = detail.str();
  return out;
}

// 4 ---------------------------------------------------------------------------

double regionDistance(const std::optional<HPolytope>& got, const std::vector<VectorXd>& expected) {
  if (!got) return expected.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  return oracle::vertexHausdorff(oracle::bruteVertices(*got), expected);
}

HPolytope randomUnit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double inletLow = 1.0 + u(rng);
  HPolytope h = oracle::box({{inletLow, inletLow + 1.0 + u(rng)},
                             {inletLow + 0.5, inletLow + 3.0 + u(rng)},
                             {0.0, 3.0 + 4.0 * u(rng)}});
  // ratio-style cut through a corner region, and a power-like cap
  h.halfSpaces.push_back({Vector3d(-(1.6 + u(rng)), 1.0, 0.0), 0.0});
  h.halfSpaces.push_back({Vector3d(-0.2, 0.3, 0.2 + 0.3 * u(rng)), -(1.5 + u(rng))});
  return h;
}

Outcome composition() {
  Outcome out;
  double worst = 0.0;
  auto compare = [&](const std::optional<HPolytope>& got, const std::vector<VectorXd>& expected,
                     const std::string& what) {
    const double d = regionDistance(got, expected);
    worst = std::max(worst, d);
    out.require(d <= 1e-7, what);
  };

  const HPolytope b = oracle::box({{1, 2}, {2, 3}, {0, 5}});
  compare(stagePolytope({b}), oracle::bruteVertices(b), "single parallel unit");
  compare(stagePolytope({b, b}), oracle::parallelOracle({b, b}), "two identical boxes");
  compare(stagePolytope({b, b}), oracle::bruteVertices(oracle::box({{1, 2}, {2, 3}, {0, 10}})),
          "two identical boxes, hand region");
  out.require(!stagePolytope({b, oracle::box({{4, 5}, {2, 3}, {0, 5}})}).has_value(),
              "disjoint inlet ranges");

  const HPolytope second = oracle::box({{2.5, 4}, {4, 6}, {1, 8}});
  compare(configurationPolytope({b}), oracle::bruteVertices(b), "single stage");
  compare(configurationPolytope({b, second}), oracle::seriesOracle({b, second}), "two stages");

  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<HPolytope> units{randomUnit(rng), randomUnit(rng), randomUnit(rng)};
    const auto expected = oracle::parallelOracle(units);
    std::vector<int> order{0, 1, 2};
    do {
      compare(stagePolytope({units[order[0]], units[order[1]], units[order[2]]}), expected,
              "parallel permutation");
    } while (std::next_permutation(order.begin(), order.end()));
    const auto stage = stagePolytope(units);
    if (stage) compare(configurationPolytope({*stage, second}), oracle::seriesOracle({*stage, second}),
                       "random stage in series");
  }
  std::ostringstream detail;
  detail << "worst vertex distance " << worst;
  if (out.pass) out.detail = detail.str();
  return out;
}

// 5 ---------------------------------------------------------------------------

Outcome decomposition() {
  Outcome out;
  const Instance instance = testing::loadWithRanges("mini_station.json");
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);
  const HighsBackend backend;
  StationSolver solver(problem, backend);
  const std::size_t n = problem.positions();
  const int initial = instance.scenario.initialState.mode;
  double worst = 0.0;
  std::size_t compared = 0;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<int> modes{initial};
    for (std::size_t t = 1; t < n; ++t) modes.push_back((mask >> (t - 1)) & 1);
    const double decomposed = solver.sequenceObjective(modes);
    if (!std::isfinite(decomposed)) continue;
    std::vector<int> directions(n, 0);
    directions[0] = -1;
    const ModelInstance full = buildFullModel(problem, {ModeSequence{modes, directions}});
    const SolveResult r = backend.solve(full, defaultSettingsFor(Variant::Full));
    if (!r.hasSolution()) {
      out.require(false, "pinned full model without solution");
      continue;
    }
    const ObjectiveBreakdown parts = full.breakdown(r.assignment);
    const double slackAndChange = parts[CostCategory::PressureSlack] + parts[CostCategory::FlowSlack] +
                                  parts[CostCategory::ModeChange] + parts[CostCategory::UnitStart];
    const double rel = std::abs(decomposed - slackAndChange) / std::max(1.0, std::abs(slackAndChange));
    worst = std::max(worst, rel);
    ++compared;
  }
  out.require(compared == (1u << (n - 1)), "some sequences were not comparable");
  out.require(worst <= 1e-5, "decomposed objective differs");
  std::ostringstream detail;
  detail << compared << " sequences, worst relative difference " << worst;
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 6 ---------------------------------------------------------------------------

/// Mini-station variant with seeded demand profiles.
Instance seededMini(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exitPressure(46.0, 64.0);
  std::uniform_real_distribution<double> sourcePressure(47.0, 53.0);
  std::uniform_real_distribution<double> flow(70.0, 130.0);
  auto document = testing::fixtureJson(seed % 2 == 0 ? "mini_station.json" : "trio_station.json");
  const std::size_t positions = document["scenario"]["timeGrid"].size();
  nlohmann::json exitSeries = nlohmann::json::array();
  nlohmann::json sourceSeries = nlohmann::json::array();
  nlohmann::json inSeries = nlohmann::json::array();
  nlohmann::json outSeries = nlohmann::json::array();
  exitSeries.push_back(50.0);
  sourceSeries.push_back(50.0);
  inSeries.push_back(100.0);
  outSeries.push_back(-100.0);
  for (std::size_t t = 1; t < positions; ++t) {
    exitSeries.push_back(std::round(exitPressure(rng) * 10.0) / 10.0);
    sourceSeries.push_back(std::round(sourcePressure(rng) * 10.0) / 10.0);
    const double f = std::round(flow(rng));
    inSeries.push_back(f);
    outSeries.push_back(-f);
  }
  document["scenario"]["pressureDemand"]["X"] = exitSeries;
  document["scenario"]["pressureDemand"]["S"] = sourceSeries;
  document["scenario"]["flowDemand"]["gS"] = inSeries;
  document["scenario"]["flowDemand"]["gX"] = outSeries;
  document["name"] = "seeded_" + std::to_string(seed);
  return testing::withRanges(parseInstance(document));
}

Outcome versusExact() {
  Outcome out;
  const auto start = Clock::now();
  const HighsBackend backend;
  std::vector<double> gaps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance instance = seededMini(seed);
    const StationProblem problem(instance.spec, instance.scenario, instance.weights);
    StationSolver solver(problem, backend);
    ControlPlan plan;
    try {
      plan = solver.solve();
    } catch (const std::exception& e) {
      out.require(false, "seed " + std::to_string(seed) + ": " + e.what());
      continue;
    }
    out.require(plan.check.ok(CheckReport::kFeasibilityTolerance),
                "seed " + std::to_string(seed) + ": plan violates the model");
    SolveSettings settings = defaultSettingsFor(Variant::Full);
    settings.timeLimit = 600.0;
    const LowerBoundResult bound = lowerBound(problem, plan, backend, settings);
    gaps.push_back(bound.gap);
  }
  const double elapsed = seconds(start);
  const auto within10 = std::count_if(gaps.begin(), gaps.end(), [](double g) { return g <= 0.10; });
  const double worst = gaps.empty() ? 1.0 : *std::max_element(gaps.begin(), gaps.end());
  out.require(gaps.size() == 10, "not every instance was solved");
  out.require(worst <= 0.25, "gap above 25%");
  out.require(2 * within10 >= 10, "fewer than half within 10%");
  out.require(elapsed < 600.0, "slower than 10 minutes");
  std::ostringstream detail;
  detail << gaps.size() << " plans, worst gap " << worst << ", " << within10 << " within 10%, "
         << elapsed << " s";
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 7 ---------------------------------------------------------------------------

StationSpec modesOnly(int count, std::vector<std::vector<double>> theta) {
  StationSpec spec;
  for (int m = 0; m < count; ++m) spec.modes.push_back({"m" + std::to_string(m), {}});
  spec.transitionTimes = std::move(theta);
  return spec;
}

Outcome transitions() {
  Outcome out;
  constexpr double hour = 3600.0;
  std::vector<double> hourly;
  for (int i = 0; i < 7; ++i) hourly.push_back(i * hour);

  const StationSpec figure = modesOnly(3, {{0, hour, hour}, {hour, 0, 5 * hour}, {hour, 5 * hour, 0}});
  const std::vector<int> conflict{0, 0, 1, 1, 2, 2, 2};
  out.require(!transitionsWork(figure, conflict, hourly), "conflict pattern accepted");
  out.require(!oracle::intervalsDisjoint(conflict, hourly, figure.transitionTimes),
              "oracle accepts conflict pattern");
  const StationSpec slow = modesOnly(2, {{0, 10 * hour}, {10 * hour, 0}});
  out.require(transitionsWork(slow, {0, 0, 0, 0, 0, 0, 1}, hourly), "last-mode exemption");
  out.require(oracle::intervalsDisjoint({0, 0, 0, 0, 0, 0, 1}, hourly, slow.transitionTimes),
              "oracle last-mode exemption");

  std::mt19937_64 rng(7);
  std::size_t agree = 0;
  std::size_t rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = std::uniform_int_distribution<int>(2, 5)(rng);
    std::vector<std::vector<double>> theta(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) theta[i][j] = std::uniform_int_distribution<int>(0, 16)(rng) * 15.0 * 60.0;
    const int positions = std::uniform_int_distribution<int>(2, 13)(rng);
    std::vector<double> grid{0.0};
    for (int i = 1; i < positions; ++i)
      grid.push_back(grid.back() + std::uniform_int_distribution<int>(1, 8)(rng) * 15.0 * 60.0);
    std::vector<int> sequence{std::uniform_int_distribution<int>(0, m - 1)(rng)};
    for (int i = 1; i < positions; ++i) {
      // Mostly keep the mode so that phases have varied lengths.
      const bool change = std::uniform_real_distribution<double>(0, 1)(rng) < 0.35;
      sequence.push_back(change ? std::uniform_int_distribution<int>(0, m - 1)(rng) : sequence.back());
    }
    const bool got = transitionsWork(modesOnly(m, theta), sequence, grid);
    const bool expected = oracle::intervalsDisjoint(sequence, grid, theta);
    if (got == expected) ++agree;
    if (!expected) ++rejected;
  }
  out.require(agree == 1000, "disagreement with the interval simulator");
  std::ostringstream detail;
  detail << agree << "/1000 agree (" << rejected << " infeasible), conflict and exemption cases ok";
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 8 ---------------------------------------------------------------------------

Outcome scaling() {
  Outcome out;
  const Instance day = testing::loadWithRanges("mini_day.json");
  const HighsBackend backend;
  constexpr std::size_t horizon = 4;
  std::vector<double> perSolve;
  std::vector<std::size_t> counts;
  std::vector<double> times;
  for (int steps : {12, 24, 48, 96}) {
    const Instance instance = retime(day, timeGridTemplate(steps).grid());
    const StationProblem problem(instance.spec, instance.scenario, instance.weights);
    AlgorithmOptions options;
    options.horizon = horizon;
    StationSolver solver(problem, backend, options);
    ModeSequence sequence = solver.improvementHeuristic(solver.initialSolution());
    double best = std::numeric_limits<double>::infinity();
    std::size_t solves = 0;
    for (int repeat = 0; repeat < 3; ++repeat) {
      const std::size_t before = solver.counts().transientFixed;
      const auto start = Clock::now();
      solver.transientSmoothing(sequence);
      best = std::min(best, seconds(start));
      solves = solver.counts().transientFixed - before;
    }
    const std::size_t expected = problem.positions() - horizon + 1;
    out.require(solves == expected, std::to_string(steps) + " steps: " + std::to_string(solves) +
                                        " solves, expected " + std::to_string(expected));
    counts.push_back(solves);
    times.push_back(best);
    perSolve.push_back(best / static_cast<double>(solves));
  }
  double low = std::numeric_limits<double>::infinity();
  double high = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double growth = (times[k] / times[0]) / (static_cast<double>(counts[k]) / counts[0]);
    low = std::min(low, growth);
    high = std::max(high, growth);
  }
  out.require(high <= 1.5 && low >= 1.0 / 1.5, "smoothing time not within 1.5 of linear");
  std::ostringstream detail;
  detail << "solves";
  for (std::size_t c : counts) detail << ' ' << c;
  detail << "; seconds";
  for (double t : times) detail << ' ' << t;
  detail << "; growth vs linear in [" << low << ", " << high << "]";
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// 9 ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> exportRun(const std::filesystem::path& dir) {
  std::filesystem::remove_all(dir);
  const Instance instance = testing::loadWithRanges("mini_station.json");
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);
  const HighsBackend backend;
  AlgorithmOptions options;
  options.exportDirectory = dir;
  options.seed = 17;
  StationSolver solver(problem, backend, options);
  solver.solve();
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    files.emplace_back(entry.path().filename().string(), text.str());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome settingsFidelity() {
  Outcome out;
  const SolveSettings stationary = defaultSettingsFor(Variant::Stationary);
  const SolveSettings fixed = defaultSettingsFor(Variant::StationaryFixed);
  const SolveSettings transient = defaultSettingsFor(Variant::TransientFixed);
  for (const SolveSettings& s : {stationary, fixed}) {
    out.require(s.relativeGap == 1e-4 && s.absoluteGap == 1e-2 && s.timeLimit == 10 * 3600.0,
                "stationary row");
  }
  out.require(transient.relativeGap == 5e-3 && transient.absoluteGap == 1e-2 &&
                  transient.timeLimit == 60.0,
              "transient row");
  const auto base = std::filesystem::temp_directory_path() / "netstation_acceptance_lp";
  const auto first = exportRun(base / "a");
  const auto second = exportRun(base / "b");
  out.require(!first.empty(), "nothing exported");
  out.require(first == second, "exports differ between runs");
  if (out.pass) out.detail = "table rows match, " + std::to_string(first.size()) + " LP files identical";
  return out;
}

// 10 --------------------------------------------------------------------------

Outcome unitRoundTrips() {
  Outcome out;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> magnitude(-6.0, 6.0);
  std::uniform_real_distribution<double> density(0.6, 0.9);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, magnitude(rng)) * (i % 2 == 0 ? 1.0 : -1.0);
    const double rho = density(rng);
    worst = std::max(worst, relative(units::paToBar(units::barToPa(x)), x));
    worst = std::max(worst, relative(units::barToPa(units::paToBar(x)), x));
    worst = std::max(worst, relative(units::volumetricToMassFlow(units::massFlowToVolumetric(x, rho), rho), x));
    worst = std::max(worst, relative(units::massFlowToVolumetric(units::volumetricToMassFlow(x, rho), rho), x));
  }
  out.require(worst <= 1e-12, "round trip drift");
  std::ostringstream detail;
  detail << "worst relative drift " << worst;
  if (out.pass) out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry oracles", geometry},
      {"sampling statistics", sampling},
      {"physics formulas", physics},
      {"composition", composition},
      {"decomposition audit", decomposition},
      {"algorithm vs exact", versusExact},
      {"transition logic", transitions},
      {"rolling-horizon scaling", scaling},
      {"settings fidelity", settingsFidelity},
      {"unit round trips", unitRoundTrips},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %2zu %-24s %s  %s\n", i + 1, criteria[i].first.c_str(),
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
