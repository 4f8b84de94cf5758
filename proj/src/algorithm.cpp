#include "netstation/algorithm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "netstation/errors.hpp"

namespace netstation {

namespace {

constexpr double kTimeSlack = 1e-9;  // seconds

bool fits(double required, double available) {
  return required <= available + kTimeSlack * std::max(1.0, required);
}

std::vector<int> unitsOf(const CompressorStationData& station, ModeToken token) {
  if (token.kind != ModeToken::Kind::Active) return {};
  if (token.configuration < 0 ||
      static_cast<std::size_t>(token.configuration) >= station.configurations.size()) {
    throw std::invalid_argument("configuration token does not belong to the station");
  }
  return station.configurations[token.configuration].unitSet();
}

bool isSubset(const std::vector<int>& small, const std::vector<int>& large) {
  return std::includes(large.begin(), large.end(), small.begin(), small.end());
}

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

bool transitionsWork(const StationSpec& spec, const std::vector<int>& modes,
                     const std::vector<double>& timeGrid) {
  if (modes.size() > timeGrid.size()) {
    throw std::invalid_argument("mode sequence is longer than the time grid");
  }
  // Phase starts; the last phase is open-ended and never checked.
  std::vector<std::size_t> starts;
  for (std::size_t t = 0; t < modes.size(); ++t) {
    if (t == 0 || modes[t] != modes[t - 1]) starts.push_back(t);
  }
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    const int mode = modes[starts[k]];
    const int next = modes[starts[k + 1]];
    double required = spec.transitionTime(mode, next) / 2.0;
    if (k > 0) required += spec.transitionTime(modes[starts[k - 1]], mode) / 2.0;
    const double duration = timeGrid[starts[k + 1]] - timeGrid[starts[k]];
    if (!fits(required, duration)) return false;
  }
  return true;
}

bool notSoonInfeasible(const StationSpec& spec, std::size_t t, int newMode, int oldMode,
                       const std::vector<double>& timeGrid) {
  const std::size_t positions = timeGrid.size();
  const double incoming = newMode == oldMode ? 0.0 : spec.transitionTime(oldMode, newMode) / 2.0;
  for (std::size_t dead = t + 1; dead < positions; ++dead) {
    if (modeAvailable(spec, timeGrid, newMode, dead)) continue;
    // Escaping before the first outage also covers every later one.
    for (std::size_t escape = t + 1; escape <= dead; ++escape) {
      for (std::size_t m = 0; m < spec.modes.size(); ++m) {
        const int other = static_cast<int>(m);
        if (other == newMode || !modeAvailable(spec, timeGrid, other, escape)) continue;
        const double required = incoming + spec.transitionTime(newMode, other) / 2.0;
        if (fits(required, timeGrid[escape] - timeGrid[t])) return true;
      }
    }
    return false;
  }
  return true;
}

std::vector<ModeToken> convexCombinationCS(const CompressorStationData& station, ModeToken x,
                                           ModeToken y) {
  const std::vector<int> ux = unitsOf(station, x);
  const std::vector<int> uy = unitsOf(station, y);
  std::vector<int> common;
  std::vector<int> either;
  std::set_intersection(ux.begin(), ux.end(), uy.begin(), uy.end(), std::back_inserter(common));
  std::set_union(ux.begin(), ux.end(), uy.begin(), uy.end(), std::back_inserter(either));

  std::vector<ModeToken> out{x, y};
  for (std::size_t c = 0; c < station.configurations.size(); ++c) {
    const std::vector<int> uc = station.configurations[c].unitSet();
    if (isSubset(common, uc) && isSubset(uc, either)) {
      out.push_back(ModeToken::active(static_cast<int>(c)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> convexCombination(const StationSpec& spec, int o1, int o2) {
  const std::vector<int> valves = spec.arcsOfKind(ArcKind::Valve);
  const std::vector<int> stations = spec.arcsOfKind(ArcKind::CompressorStation);
  std::vector<std::vector<ModeToken>> allowed;
  for (int a : stations) {
    allowed.push_back(convexCombinationCS(spec.arcs[a].station(), modeOf(spec, o1, a),
                                          modeOf(spec, o2, a)));
  }
  auto sameValves = [&](int o, int reference) {
    return std::all_of(valves.begin(), valves.end(),
                       [&](int a) { return modeOf(spec, o, a) == modeOf(spec, reference, a); });
  };
  std::vector<int> out;
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    const int o = static_cast<int>(m);
    if (!sameValves(o, o1) && !sameValves(o, o2)) continue;
    bool ok = true;
    for (std::size_t k = 0; k < stations.size() && ok; ++k) {
      const ModeToken token = modeOf(spec, o, stations[k]);
      ok = std::find(allowed[k].begin(), allowed[k].end(), token) != allowed[k].end();
    }
    if (ok) out.push_back(o);
  }
  return out;
}

double computeGap(double planObjective, double lowerBound) {
  if (planObjective < 0.0) throw std::invalid_argument("plan objective must be non-negative");
  if (planObjective < 0.1 && lowerBound < 0.1) return 0.0;
  if (planObjective == 0.0) throw std::invalid_argument("zero objective with a positive bound");
  return (planObjective - lowerBound) / planObjective;
}

std::array<double, 3> PhaseTimings::shares() const {
  const double sum = total();
  if (!(sum > 0.0)) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return {initial / sum, improve / sum, smooth / sum};
}

StationSolver::StationSolver(const StationProblem& problem, const SolverBackend& backend,
                             AlgorithmOptions options)
    : problem_(problem), backend_(backend), options_(std::move(options)) {
  if (options_.horizon < 2) throw std::invalid_argument("smoothing horizon must be at least 2");
  if (!(options_.retrySlackScale > 0.0)) {
    throw std::invalid_argument("retry slack scale must be positive");
  }
  decisions_.resize(problem_.positions());
}

SolveSettings StationSolver::settingsFor(Variant variant) const {
  std::optional<SolveSettings> chosen;
  switch (variant) {
    case Variant::Stationary: chosen = options_.stationarySettings; break;
    case Variant::StationaryFixed: chosen = options_.fixedSettings; break;
    case Variant::TransientFixed: chosen = options_.transientSettings; break;
    case Variant::Full: break;
  }
  SolveSettings settings = chosen.value_or(defaultSettingsFor(variant));
  settings.seed = options_.seed;
  checkSettings(settings);
  return settings;
}

void StationSolver::exportModel(const ModelInstance& model) {
  if (!options_.exportDirectory) return;
  std::filesystem::create_directories(*options_.exportDirectory);
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%05zu_", exportCount_++);
  writeLpFile(model, *options_.exportDirectory / (prefix + model.name + ".lp"));
}

SolveResult StationSolver::run(const ModelInstance& model, const SolveSettings& settings) {
  exportModel(model);
  SolveResult result = backend_.solve(model, settings);
  if (result.status == SolveStatus::Error) {
    throw BackendError(model.name + ": " + result.message);
  }
  return result;
}

const FixedModeResult& StationSolver::fixedMode(std::size_t t, int mode, int previousMode) {
  const auto key = std::make_tuple(t, mode, previousMode);
  if (auto it = fixedCache_.find(key); it != fixedCache_.end()) {
    ++counts_.stationaryFixedCached;
    return it->second;
  }
  FixedModeResult entry;
  if (problem_.available(mode, t)) {
    const ModelInstance model = buildStationaryFixedModel(problem_, t, mode, previousMode);
    const SolveResult result = run(model, settingsFor(Variant::StationaryFixed));
    ++counts_.stationaryFixed;
    if (result.hasSolution()) {
      entry.feasible = true;
      entry.objective = result.objective;
      entry.state = extractStates(problem_, model, result.assignment).front();
      entry.direction = entry.state.direction;
    }
  }
  return fixedCache_.emplace(key, std::move(entry)).first->second;
}

ModeSequence StationSolver::initialSolution() {
  const StationSpec& spec = problem_.spec();
  const std::vector<double>& grid = problem_.scenario().timeGrid;
  const double changeCost = problem_.modelWeights().modeChange;

  ModeSequence sequence;
  sequence.modes.push_back(problem_.scenario().initialState.mode);
  sequence.directions.push_back(-1);
  for (std::size_t t = 1; t < problem_.positions(); ++t) {
    const int oldMode = sequence.modes.back();
    const FixedModeResult& keep = fixedMode(t, oldMode, oldMode);
    if (keep.feasible && problem_.available(oldMode, t) && keep.objective < changeCost) {
      sequence.modes.push_back(oldMode);
      sequence.directions.push_back(keep.direction);
      decisions_[t] = {oldMode, oldMode, keep.direction};
      continue;
    }

    std::vector<int> validModes;
    std::vector<int> candidate = sequence.modes;
    candidate.push_back(-1);
    for (std::size_t m = 0; m < spec.modes.size(); ++m) {
      const int o = static_cast<int>(m);
      candidate.back() = o;
      if (problem_.available(o, t) && transitionsWork(spec, candidate, grid) &&
          notSoonInfeasible(spec, t, o, oldMode, grid)) {
        validModes.push_back(o);
      }
    }
    if (validModes.empty()) {
      throw AbortWithoutSolution(static_cast<int>(t),
                                 "no operation mode passes availability and transition checks at "
                                 "position " + std::to_string(t));
    }
    const ModelInstance model = buildStationaryModel(problem_, t, validModes, oldMode);
    const SolveResult result = run(model, settingsFor(Variant::Stationary));
    ++counts_.stationary;
    if (!result.hasSolution()) {
      throw AbortWithoutSolution(static_cast<int>(t),
                                 "stationary model without solution at position " +
                                     std::to_string(t) + " (" +
                                     std::string(statusName(result.status)) + ")");
    }
    const State state = extractStates(problem_, model, result.assignment).front();
    int best = state.mode;
    int direction = state.direction;
    // Equal-cost modes resolve to the lowest index.
    const double tie = 1e-9 * std::max(1.0, std::abs(result.objective));
    for (int o : validModes) {
      if (o >= best) break;
      const FixedModeResult& alt = fixedMode(t, o, oldMode);
      if (alt.feasible && alt.objective <= result.objective + tie) {
        best = o;
        direction = alt.direction;
        break;
      }
    }
    sequence.modes.push_back(best);
    sequence.directions.push_back(direction);
    decisions_[t] = {best, oldMode, direction};
  }
  return sequence;
}

double StationSolver::sequenceObjective(const std::vector<int>& modes) {
  if (modes.size() != problem_.positions()) {
    throw std::invalid_argument("mode sequence does not cover the time grid");
  }
  double total = 0.0;
  for (std::size_t t = 1; t < modes.size(); ++t) {
    const FixedModeResult& step = fixedMode(t, modes[t], modes[t - 1]);
    if (!step.feasible) return std::numeric_limits<double>::infinity();
    total += step.objective;
  }
  return total;
}

void StationSolver::fixDirections(ModeSequence& sequence) {
  sequence.directions.assign(sequence.size(), -1);
  for (std::size_t t = 1; t < sequence.size(); ++t) {
    const Decision& d = decisions_[t];
    if (d.mode == sequence.modes[t] && d.previous == sequence.modes[t - 1]) {
      sequence.directions[t] = d.direction;
    } else {
      sequence.directions[t] = fixedMode(t, sequence.modes[t], sequence.modes[t - 1]).direction;
    }
  }
}

ModeSequence StationSolver::improvementHeuristic(ModeSequence sequence) {
  const StationSpec& spec = problem_.spec();
  const std::vector<double>& grid = problem_.scenario().timeGrid;
  std::vector<int> modes = sequence.modes;
  double objective = sequenceObjective(modes);
  if (!std::isfinite(objective)) {
    diagnostics_.push_back("improvement skipped: input sequence has an infeasible step");
    return sequence;
  }
  const std::size_t n = modes.size();
  bool backwards = true;
  int idleSweeps = 0;
  while (idleSweeps < 2) {
    ++counts_.improvementSweeps;
    bool improved = false;
    std::vector<std::size_t> changeTimes;
    for (std::size_t t = 1; t < n; ++t) {
      if (modes[t - 1] != modes[t]) changeTimes.push_back(t);
    }
    if (backwards) std::reverse(changeTimes.begin(), changeTimes.end());

    for (std::size_t t : changeTimes) {
      if (modes[t - 1] == modes[t]) continue;
      std::size_t first = 0;
      std::size_t last = 0;
      if (backwards) {
        // The initial position is given data and never replaced.
        if (t - 1 == 0) continue;
        last = t - 1;
        first = last;
        while (first > 1 && modes[first - 1] == modes[last]) --first;
      } else {
        first = t;
        last = t;
        while (last + 1 < n && modes[last + 1] == modes[first]) ++last;
      }

      std::vector<int> best;
      double bestImprovement = 0.0;
      for (int candidate : convexCombination(spec, modes[t - 1], modes[t])) {
        if (candidate == modes[first]) continue;
        std::vector<int> replaced = modes;
        std::fill(replaced.begin() + static_cast<std::ptrdiff_t>(first),
                  replaced.begin() + static_cast<std::ptrdiff_t>(last) + 1, candidate);
        bool available = true;
        for (std::size_t s = first; s <= last && available; ++s) {
          available = problem_.available(candidate, s);
        }
        if (!available || !transitionsWork(spec, replaced, grid)) continue;
        const double improvement = objective - sequenceObjective(replaced);
        if (improvement > bestImprovement) {
          best = std::move(replaced);
          bestImprovement = improvement;
        }
      }
      if (bestImprovement > 0.0) {
        modes = std::move(best);
        objective = sequenceObjective(modes);
        improved = true;
      }
    }
    idleSweeps = improved ? 0 : idleSweeps + 1;
    backwards = !backwards;
  }
  sequence.modes = std::move(modes);
  fixDirections(sequence);
  return sequence;
}

std::vector<State> StationSolver::transientSmoothing(const ModeSequence& sequence) {
  const std::size_t positions = problem_.positions();
  if (sequence.size() != positions) {
    throw std::invalid_argument("mode sequence does not cover the time grid");
  }
  const std::size_t h = std::min(options_.horizon, positions);

  auto solveWindow = [&](std::size_t start, const State& startState) {
    WindowModes window;
    window.start = start;
    window.startState = startState;
    window.modes.assign(sequence.modes.begin() + static_cast<std::ptrdiff_t>(start) + 1,
                        sequence.modes.begin() + static_cast<std::ptrdiff_t>(start + h));
    window.directions.assign(sequence.directions.begin() + static_cast<std::ptrdiff_t>(start) + 1,
                             sequence.directions.begin() + static_cast<std::ptrdiff_t>(start + h));
    const SolveSettings settings = settingsFor(Variant::TransientFixed);
    for (int attempt = 0; attempt < 2; ++attempt) {
      const ModelInstance model = buildTransientFixedModel(problem_, window);
      const SolveResult result = run(model, settings);
      ++counts_.transientFixed;
      if (result.hasSolution()) return extractStates(problem_, model, result.assignment);
      if (attempt == 0) {
        ++counts_.smoothingRetries;
        diagnostics_.push_back("smoothing window at position " + std::to_string(start) + " " +
                               std::string(statusName(result.status)) +
                               ", retried with slack weights scaled by " +
                               std::to_string(options_.retrySlackScale));
        window.slackScale = options_.retrySlackScale;
      }
    }
    throw SmoothingError(start, "transient window starting at position " + std::to_string(start) +
                                    " has no solution");
  };

  std::vector<State> states{problem_.scenario().initialState};
  if (positions < 2) return states;
  for (std::size_t start = 0; start + h <= positions; ++start) {
    std::vector<State> window = solveWindow(start, states.back());
    if (start + h == positions) {
      states.insert(states.end(), std::make_move_iterator(window.begin()),
                    std::make_move_iterator(window.end()));
    } else {
      states.push_back(std::move(window.front()));
    }
  }
  return states;
}

ControlPlan StationSolver::assemblePlan(const ModeSequence& sequence,
                                        std::vector<State> states) const {
  ControlPlan plan;
  plan.sequence = sequence;
  plan.states = std::move(states);
  plan.fullModel = buildFullModel(problem_, {sequence});
  plan.assignment = assignmentFromPlan(problem_, plan.fullModel, plan.states, sequence);
  plan.check = checkAssignment(plan.fullModel, plan.assignment);
  plan.objective = plan.fullModel.objectiveValue(plan.assignment);
  plan.breakdown = plan.fullModel.breakdown(plan.assignment);
  return plan;
}

ControlPlan StationSolver::solve() {
  using Clock = std::chrono::steady_clock;
  PhaseTimings timings;
  auto mark = Clock::now();
  ModeSequence sequence = initialSolution();
  timings.initial = seconds(mark);

  mark = Clock::now();
  sequence = improvementHeuristic(std::move(sequence));
  timings.improve = seconds(mark);

  mark = Clock::now();
  std::vector<State> states = transientSmoothing(sequence);
  timings.smooth = seconds(mark);

  ControlPlan plan = assemblePlan(sequence, std::move(states));
  plan.timings = timings;
  plan.counts = counts_;
  plan.diagnostics = diagnostics_;
  if (!plan.check.ok()) {
    plan.diagnostics.push_back("plan violates " + plan.check.worstEntity + " by " +
                               std::to_string(plan.check.worstViolation));
  }
  return plan;
}

LowerBoundResult lowerBound(const StationProblem& problem, const ControlPlan& plan,
                            const SolverBackend& backend, SolveSettings settings) {
  ModelInstance model = buildFullModel(problem);
  model.warmStart = assignmentFromPlan(problem, model, plan.states, plan.sequence);
  LowerBoundResult out;
  out.result = backend.solve(model, settings);
  if (out.result.status == SolveStatus::Error) {
    throw BackendError(model.name + ": " + out.result.message);
  }
  out.gap = computeGap(plan.objective, std::max(0.0, out.result.bound));
  return out;
}

}  // namespace netstation
