#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "netstation/algorithm.hpp"
#include "netstation/errors.hpp"
#include "netstation/io.hpp"
#include "netstation/units.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

constexpr double kHour = 3600.0;

StationSpec modesOnly(int count, std::vector<std::vector<double>> theta) {
  StationSpec spec;
  for (int m = 0; m < count; ++m) spec.modes.push_back({"m" + std::to_string(m), {}});
  spec.transitionTimes = std::move(theta);
  return spec;
}

std::vector<double> hourly(int positions) {
  std::vector<double> grid;
  for (int i = 0; i < positions; ++i) grid.push_back(i * kHour);
  return grid;
}

Configuration config(const std::string& id, std::vector<int> units) {
  Configuration c;
  c.id = id;
  c.stages = {std::move(units)};
  return c;
}

/// Two valves and one station with configurations {u1}, {u2}, {u1, u2}.
StationSpec combinationSpec() {
  StationSpec spec;
  spec.nodes = {{"a", NodeKind::Boundary, {}, {}, {}}, {"b", NodeKind::Inner, {}, {}, {}},
                {"c", NodeKind::Boundary, {}, {}, {}}};
  CompressorStationData station;
  station.units = {CompressorUnit{"u1", {}, 1, 1, 1, 1}, CompressorUnit{"u2", {}, 1, 1, 1, 1}};
  station.configurations = {config("c1", {0}), config("c2", {1}), config("c12", {0, 1})};
  spec.arcs.push_back({"v1", 0, 1, TimeSeries(0.0), TimeSeries(1.0), ValveData{}});
  spec.arcs.push_back({"v2", 1, 2, TimeSeries(0.0), TimeSeries(1.0), ValveData{}});
  spec.arcs.push_back({"cs", 0, 1, TimeSeries(0.0), TimeSeries(1.0), station});
  auto mode = [&](std::string id, ModeToken v1, ModeToken v2, ModeToken cs) {
    spec.modes.push_back({std::move(id), {v1, v2, cs}});
  };
  const auto open = ModeToken::open();
  const auto closed = ModeToken::closed();
  mode("one", open, closed, ModeToken::active(0));
  mode("two", open, closed, ModeToken::active(1));
  mode("both", open, closed, ModeToken::active(2));
  mode("swapped", closed, open, ModeToken::active(2));
  mode("mixed", open, open, ModeToken::active(0));
  return spec;
}

const Instance& trio() {
  static const Instance instance = testing::loadWithRanges("trio_station.json", 5000);
  return instance;
}

const Instance& mini() {
  static const Instance instance = testing::loadWithRanges("mini_station.json", 5000);
  return instance;
}

/// Cheapest sequence by exhaustive search over modes of positions 1..n-1.
std::pair<std::vector<int>, double> bestSequence(StationSolver& solver, const StationProblem& problem) {
  const std::size_t n = problem.positions();
  const int modes = static_cast<int>(problem.spec().modes.size());
  std::vector<int> seq(n, problem.scenario().initialState.mode);
  std::pair<std::vector<int>, double> best{{}, std::numeric_limits<double>::infinity()};
  std::function<void(std::size_t)> recurse = [&](std::size_t t) {
    if (t == n) {
      if (!transitionsWork(problem.spec(), seq, problem.scenario().timeGrid)) return;
      const double cost = solver.sequenceObjective(seq);
      if (cost < best.second - 1e-9) best = {seq, cost};
      return;
    }
    for (int m = 0; m < modes; ++m) {
      seq[t] = m;
      recurse(t + 1);
    }
  };
  recurse(1);
  return best;
}

}  // namespace

TEST_CASE("transition rule examples") {
  // Modes B, C, D as 0, 1, 2.
  const StationSpec spec = modesOnly(3, {{0, 1 * kHour, 1 * kHour},
                                         {1 * kHour, 0, 5 * kHour},
                                         {1 * kHour, 5 * kHour, 0}});
  const auto grid = hourly(7);
  CHECK(transitionsWork(spec, {0, 0, 0, 0, 0, 0, 0}, grid));
  // C from 2 h, D from 4 h: the C phase lasts 2 h but needs 0.5 h + 2.5 h.
  CHECK_FALSE(transitionsWork(spec, {0, 0, 1, 1, 2, 2, 2}, grid));
  CHECK_FALSE(oracle::intervalsDisjoint({0, 0, 1, 1, 2, 2, 2}, grid, spec.transitionTimes));
  CHECK(transitionsWork(spec, {0, 0, 1, 1, 1, 1, 2}, grid) ==
        oracle::intervalsDisjoint({0, 0, 1, 1, 1, 1, 2}, grid, spec.transitionTimes));
  // Only the final step changes: the last phase is never checked, the one
  // before it still holds half the transition.
  const StationSpec slow = modesOnly(2, {{0, 10 * kHour}, {10 * kHour, 0}});
  CHECK(transitionsWork(slow, {0, 0, 0, 0, 0, 0, 1}, grid));
  CHECK_FALSE(transitionsWork(slow, {0, 0, 0, 0, 1, 1, 1}, grid));
  // The first phase needs room for half its outgoing transition.
  const StationSpec halfHour = modesOnly(2, {{0, 3 * kHour}, {3 * kHour, 0}});
  CHECK_FALSE(transitionsWork(halfHour, {0, 1, 1, 1, 0, 0, 0}, grid));
  CHECK(transitionsWork(halfHour, {0, 0, 1, 1, 1, 0, 0}, grid));
}

TEST_CASE("transition rule agrees with the interval oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> modeCount(2, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = modeCount(rng);
    std::vector<std::vector<double>> theta(m, std::vector<double>(m, 0.0));
    std::uniform_real_distribution<double> minutes(0.0, 120.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) theta[i][j] = std::round(minutes(rng)) * 60.0;
    const int positions = std::uniform_int_distribution<int>(2, 10)(rng);
    std::vector<double> grid{0.0};
    for (int i = 1; i < positions; ++i)
      grid.push_back(grid.back() + 60.0 * std::uniform_int_distribution<int>(1, 4)(rng) * 15.0);
    std::vector<int> seq;
    for (int i = 0; i < positions; ++i) seq.push_back(std::uniform_int_distribution<int>(0, m - 1)(rng));
    const StationSpec spec = modesOnly(m, theta);
    CHECK(transitionsWork(spec, seq, grid) == oracle::intervalsDisjoint(seq, grid, theta));
  }
}

TEST_CASE("leaving a mode before it becomes unavailable") {
  StationSpec spec = trio().spec;
  const auto grid = hourly(6);
  const int station = spec.arcIndex("cs1");
  const int valve = spec.modeIndex("oValve");
  const int first = spec.modeIndex("oC1");
  const int second = spec.modeIndex("oC2");

  spec.outages.clear();
  for (int m = 0; m < 3; ++m) CHECK(notSoonInfeasible(spec, 1, m, valve, grid));

  // u1 out from 2 h on; entering oC1 at 1 h with 3 h transitions everywhere.
  spec.outages = {{station, 0, 2 * kHour, 10 * kHour}};
  for (auto& row : spec.transitionTimes)
    for (auto& v : row) v = v == 0.0 ? 0.0 : 3 * kHour;
  CHECK_FALSE(notSoonInfeasible(spec, 1, first, valve, grid));

  // Dies late, a sibling reachable without delay.
  spec.outages = {{station, 0, 4 * kHour, 10 * kHour}};
  spec.transitionTimes[first][second] = 0.0;
  CHECK(notSoonInfeasible(spec, 1, first, valve, grid));
}

TEST_CASE("escape check agrees with brute-force reachability") {
  std::mt19937_64 rng(77);
  const StationSpec base = trio().spec;
  const int station = base.arcIndex("cs1");
  for (int trial = 0; trial < 300; ++trial) {
    StationSpec spec = base;
    std::uniform_real_distribution<double> minutes(0.0, 180.0);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        spec.transitionTimes[i][j] = i == j ? 0.0 : std::round(minutes(rng) / 15.0) * 15.0 * 60.0;
    spec.outages.clear();
    const int windows = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int w = 0; w < windows; ++w) {
      const double start = std::uniform_int_distribution<int>(0, 12)(rng) * 30.0 * 60.0;
      const double length = std::uniform_int_distribution<int>(1, 6)(rng) * 30.0 * 60.0;
      spec.outages.push_back({station, std::uniform_int_distribution<int>(0, 1)(rng), start, start + length});
    }
    std::vector<double> grid{0.0};
    for (int i = 1; i < 9; ++i) grid.push_back(grid.back() + std::uniform_int_distribution<int>(1, 4)(rng) * 15.0 * 60.0);
    const auto available = [&](int m, std::size_t s) { return modeAvailable(spec, grid, m, s); };
    const std::size_t t = std::uniform_int_distribution<std::size_t>(1, grid.size() - 2)(rng);
    const int next = std::uniform_int_distribution<int>(0, 2)(rng);
    const int previous = std::uniform_int_distribution<int>(0, 2)(rng);
    CHECK(notSoonInfeasible(spec, t, next, previous, grid) ==
          oracle::escapeExists(t, next, previous, grid, spec.transitionTimes, available));
  }
}

TEST_CASE("station token combinations") {
  const StationSpec spec = combinationSpec();
  const auto& station = spec.arcs[2].station();
  CHECK(convexCombinationCS(station, ModeToken::bypass(), ModeToken::bypass()) ==
        std::vector<ModeToken>{ModeToken::bypass()});
  CHECK(convexCombinationCS(station, ModeToken::active(0), ModeToken::active(1)) ==
        std::vector<ModeToken>{ModeToken::active(0), ModeToken::active(1), ModeToken::active(2)});
  CHECK(convexCombinationCS(station, ModeToken::bypass(), ModeToken::active(0)) ==
        std::vector<ModeToken>{ModeToken::bypass(), ModeToken::active(0)});
  CHECK(convexCombinationCS(station, ModeToken::active(0), ModeToken::active(2)) ==
        std::vector<ModeToken>{ModeToken::active(0), ModeToken::active(2)});
}

TEST_CASE("mode combinations") {
  const StationSpec spec = combinationSpec();
  for (int m = 0; m < 5; ++m) {
    const auto same = convexCombination(spec, m, m);
    CHECK(std::find(same.begin(), same.end(), m) != same.end());
  }
  CHECK(convexCombination(spec, 0, 1) == std::vector<int>{0, 1, 2});
  // Valve patterns are copied whole from one side: "mixed" never appears.
  CHECK(convexCombination(spec, 0, 3) == std::vector<int>{0, 2, 3});
}

TEST_CASE("gap") {
  CHECK(computeGap(100.0, 90.0) == doctest::Approx(0.10));
  CHECK(computeGap(42.0, 42.0) == 0.0);
  CHECK(computeGap(0.05, 0.01) == 0.0);
  CHECK_THROWS(computeGap(-1.0, 0.0));
}

TEST_CASE("greedy pass") {
  const HighsBackend backend;

  // Demands the initial mode already meets: no change at all.
  Instance calm = mini();
  calm.scenario.pressureDemand[calm.spec.nodeIndex("X")] = TimeSeries(units::barToPa(50.0));
  const StationProblem calmProblem(calm.spec, calm.scenario, calm.weights);
  StationSolver calmSolver(calmProblem, backend);
  const ModeSequence steady = calmSolver.initialSolution();
  CHECK(steady.modes == std::vector<int>(5, 0));

  // Demand rises at position 3: one change, exactly there.
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  StationSolver solver(problem, backend);
  const ModeSequence rising = solver.initialSolution();
  CHECK(rising.modes == std::vector<int>{0, 0, 0, 1, 1});
  CHECK(rising.directions.size() == 5);
  CHECK(solver.sequenceObjective(rising.modes) < solver.sequenceObjective({0, 0, 0, 0, 0}));
  const auto pinnedCost = [&](const std::vector<int>& modes) {
    const ModelInstance model = buildFullModel(problem, {ModeSequence{modes, {-1, 0, 0, 0, 0}}});
    const SolveResult r = backend.solve(model, defaultSettingsFor(Variant::Full));
    REQUIRE(r.hasSolution());
    return r.objective;
  };
  CHECK(pinnedCost(rising.modes) < pinnedCost({0, 0, 0, 0, 0}));

  const Instance outage = testing::loadWithRanges("mini_outage.json", 2000);
  const StationProblem dead(outage.spec, outage.scenario, outage.weights);
  StationSolver deadSolver(dead, backend);
  CHECK_THROWS_AS(deadSolver.initialSolution(), AbortWithoutSolution);
}

TEST_CASE("sequence objective decomposes") {
  const StationProblem problem(trio().spec, trio().scenario, trio().weights);
  const HighsBackend backend;
  StationSolver solver(problem, backend);
  const int second = trio().spec.modeIndex("oC2");
  double steady = 0.0;
  for (std::size_t t = 1; t < 5; ++t) steady += solver.fixedMode(t, 0, 0).objective;
  CHECK(solver.sequenceObjective({0, 0, 0, 0, 0}) == doctest::Approx(steady).epsilon(1e-12));

  double changed = solver.fixedMode(1, second, second).objective;
  for (std::size_t t = 2; t < 5; ++t) changed += solver.fixedMode(t, second, second).objective;
  const double expected = changed + trio().weights.modeChange + trio().weights.unitStart;
  CHECK(solver.sequenceObjective({0, second, second, second, second}) ==
        doctest::Approx(expected).epsilon(1e-6));

  // oC1 is out from 45 minutes on.
  CHECK(std::isinf(solver.sequenceObjective({0, 1, 1, 1, 1})));
}

TEST_CASE("phase replacement") {
  const StationProblem problem(trio().spec, trio().scenario, trio().weights);
  const HighsBackend backend;
  StationSolver solver(problem, backend);
  const ModeSequence greedy = solver.initialSolution();
  CHECK(greedy.modes == std::vector<int>{0, 1, 1, 2, 2});
  const ModeSequence improved = solver.improvementHeuristic(greedy);
  CHECK(improved.modes == std::vector<int>{0, 2, 2, 2, 2});

  const auto [best, cost] = bestSequence(solver, problem);
  CHECK(improved.modes == best);
  CHECK(solver.sequenceObjective(improved.modes) == doctest::Approx(cost));

  StationSolver fresh(problem, backend);
  CHECK(fresh.improvementHeuristic(improved).modes == improved.modes);
  CHECK(fresh.counts().improvementSweeps == 2);

  StationSolver constant(problem, backend);
  const ModeSequence flat{{0, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}};
  CHECK(constant.improvementHeuristic(flat).modes == flat.modes);
}

TEST_CASE("rolling-horizon window count") {
  const HighsBackend backend;
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  {
    AlgorithmOptions options;
    options.horizon = problem.positions();
    StationSolver solver(problem, backend, options);
    const auto states = solver.transientSmoothing({{0, 0, 0, 1, 1}, {-1, 0, 0, 0, 0}});
    CHECK(states.size() == problem.positions());
    CHECK(solver.counts().transientFixed == 1);
  }
  const Instance day = testing::loadWithRanges("mini_day.json", 5000);
  std::vector<double> grid;
  for (int i = 0; i < 12; ++i) grid.push_back(i * kHour);
  const Instance twelve = retime(day, grid);
  const StationProblem longer(twelve.spec, twelve.scenario, twelve.weights);
  AlgorithmOptions options;
  options.horizon = 4;
  StationSolver solver(longer, backend, options);
  const ModeSequence constant{std::vector<int>(12, 0), std::vector<int>(12, 0)};
  auto sequence = constant;
  sequence.directions[0] = -1;
  const auto states = solver.transientSmoothing(sequence);
  CHECK(states.size() == 12);
  CHECK(solver.counts().transientFixed == 12 - 4 + 1);
}

TEST_CASE("whole procedure on the mini station") {
  const HighsBackend backend;
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  StationSolver solver(problem, backend);
  const ControlPlan plan = solver.solve();
  CHECK(plan.check.ok());
  CHECK(plan.states.size() == problem.positions());
  CHECK(plan.sequence.size() == problem.positions());
  CHECK(plan.objective == doctest::Approx(plan.breakdown.total()).epsilon(1e-9));
  const auto shares = plan.timings.shares();
  CHECK(shares[0] + shares[1] + shares[2] == doctest::Approx(1.0));
  CHECK(transitionsWork(problem.spec(), plan.sequence.modes, problem.scenario().timeGrid));

  SolveSettings settings = defaultSettingsFor(Variant::Full);
  settings.timeLimit = 120.0;
  const LowerBoundResult bound = lowerBound(problem, plan, backend, settings);
  CHECK(bound.result.bound <= plan.objective + 1e-6);
  CHECK(bound.gap >= 0.0);
  CHECK(bound.gap <= 1.0);

  CHECK((PhaseTimings{}.shares() == std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}));
}
