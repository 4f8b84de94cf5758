#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "netstation/model_builder.hpp"
#include "netstation/solver.hpp"

// Time-decoupled station procedure: a greedy forward pass over stationary
// models, phase replacement sweeps, and rolling-horizon transient smoothing.

namespace netstation {

/// Half-sum rule on the phases of `modes` (positions 0..n-1 of `timeGrid`).
/// The first phase only needs room for half its outgoing transition, the last
/// phase is not checked.
bool transitionsWork(const StationSpec& spec, const std::vector<int>& modes,
                     const std::vector<double>& timeGrid);

/// False if `newMode`, entered at `t` from `oldMode`, turns unavailable later
/// and no other mode can be reached in time: for the first unavailable step
/// t1 there must be some t < t2 <= t1 and mode m available at t2 with
/// theta(old,new)/2 + theta(new,m)/2 <= delta(t2) - delta(t).
bool notSoonInfeasible(const StationSpec& spec, std::size_t t, int newMode, int oldMode,
                       const std::vector<double>& timeGrid);

/// Station tokens "between" x and y: x, y and every configuration whose unit
/// set contains U(x) & U(y) and lies inside U(x) | U(y). Sorted.
std::vector<ModeToken> convexCombinationCS(const CompressorStationData& station, ModeToken x,
                                           ModeToken y);

/// Modes copying all valve settings of o1 or all of o2, with every station
/// token drawn from convexCombinationCS. Ascending mode index.
std::vector<int> convexCombination(const StationSpec& spec, int o1, int o2);

/// (obj - lowerBound) / obj, zero when both are below 0.1.
double computeGap(double planObjective, double lowerBound);

struct PhaseTimings {
  double initial = 0.0;  // seconds
  double improve = 0.0;
  double smooth = 0.0;
  double total() const { return initial + improve + smooth; }
  /// Fractions of total(); equal thirds when nothing was measured.
  std::array<double, 3> shares() const;
};

struct SolveCounts {
  std::size_t stationary = 0;
  std::size_t stationaryFixed = 0;
  std::size_t stationaryFixedCached = 0;
  std::size_t transientFixed = 0;
  std::size_t smoothingRetries = 0;
  std::size_t improvementSweeps = 0;
};

struct ControlPlan {
  ModeSequence sequence;
  std::vector<State> states;  // one per time position, 0 = initial state
  ModelInstance fullModel;    // P with the sequence pinned
  std::vector<double> assignment;
  double objective = 0.0;
  ObjectiveBreakdown breakdown;
  CheckReport check;
  PhaseTimings timings;
  SolveCounts counts;
  std::vector<std::string> diagnostics;
};

struct AlgorithmOptions {
  std::size_t horizon = 4;  // time positions per smoothing window, start included
  std::optional<SolveSettings> stationarySettings;  // overrides per variant
  std::optional<SolveSettings> fixedSettings;
  std::optional<SolveSettings> transientSettings;
  std::optional<std::filesystem::path> exportDirectory;  // LP files of every solved model
  std::uint64_t seed = 0;
  double retrySlackScale = 10.0;
};

/// Results of the stationary model with one mode fixed.
struct FixedModeResult {
  bool feasible = false;
  double objective = 0.0;
  int direction = -1;
  State state;
};

class StationSolver {
 public:
  StationSolver(const StationProblem& problem, const SolverBackend& backend,
                AlgorithmOptions options = {});

  /// Greedy forward pass. Throws AbortWithoutSolution.
  ModeSequence initialSolution();
  ModeSequence improvementHeuristic(ModeSequence sequence);
  /// Sum of fixed-mode stationary objectives, +inf if a step is infeasible or
  /// a mode unavailable.
  double sequenceObjective(const std::vector<int>& modes);
  /// Rolling-horizon transient solves; one state per time position.
  std::vector<State> transientSmoothing(const ModeSequence& sequence);
  /// States and sequence written into P, objective and replay check.
  ControlPlan assemblePlan(const ModeSequence& sequence, std::vector<State> states) const;

  /// Initial solution, improvement and smoothing.
  ControlPlan solve();

  const FixedModeResult& fixedMode(std::size_t t, int mode, int previousMode);
  const SolveCounts& counts() const { return counts_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  SolveResult run(const ModelInstance& model, const SolveSettings& settings);
  SolveSettings settingsFor(Variant variant) const;
  void fixDirections(ModeSequence& sequence);
  void exportModel(const ModelInstance& model);

  const StationProblem& problem_;
  const SolverBackend& backend_;
  AlgorithmOptions options_;
  std::map<std::tuple<std::size_t, int, int>, FixedModeResult> fixedCache_;
  struct Decision {
    int mode = -1;
    int previous = -1;
    int direction = -1;
  };
  std::vector<Decision> decisions_;  // per position, from the deciding stationary solve
  SolveCounts counts_;
  std::vector<std::string> diagnostics_;
  std::size_t exportCount_ = 0;
};

/// Full P warm-started with the plan; the solver bound is the lower bound.
struct LowerBoundResult {
  SolveResult result;
  double gap = 0.0;
};
LowerBoundResult lowerBound(const StationProblem& problem, const ControlPlan& plan,
                            const SolverBackend& backend, SolveSettings settings);

}  // namespace netstation
