#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netstation/model.hpp"
#include "netstation/network.hpp"

// Assembly of the station MIP and its restricted variants. Model variables
// carry pressures in bar and flows in kg/s.

namespace netstation {

/// Objective weights in the units of the input documents.
struct ObjectiveWeights {
  double pressureSlack = 1000.0;      // per bar and hour
  double flowSlack = 100.0;           // per 1000 m^3
  double modeChange = 1000.0;
  double unitStart = 1200.0;
  double regulatorModeChange = 50.0;
  double regulatorInlet = 10.0;       // per bar
  double regulatorOutlet = 10.0;
  double regulatorFlow = 1.0;         // per 1000 m^3/h
  double stationInlet = 10.0;
  double stationOutlet = 10.0;
  double stationFlow = 1.0;

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

std::vector<Violation> checkWeights(const ObjectiveWeights& weights);

/// Weights rescaled to model units: slacks per bar*s and per kg, flow
/// trackers per kg/s.
struct ModelWeights {
  double pressureSlack, flowSlack, modeChange, unitStart, regulatorModeChange;
  double regulatorInlet, regulatorOutlet, regulatorFlow;
  double stationInlet, stationOutlet, stationFlow;
};
ModelWeights toModelUnits(const ObjectiveWeights& weights, double normalDensity);

/// Fixed-velocity linearization constants from the initial state.
struct ArcLinearization {
  double z = 1.0;
  double friction = 0.0;
  double area = 0.0;
  double velocityIn = 0.0;   // pipes
  double velocityOut = 0.0;  // pipes
  double velocity = 0.0;     // resistors
};

/// Immutable bundle of everything the model builders and algorithms read.
class StationProblem {
 public:
  StationProblem(StationSpec spec, Scenario scenario, ObjectiveWeights weights = {});

  const StationSpec& spec() const { return spec_; }
  const Scenario& scenario() const { return scenario_; }
  const ObjectiveWeights& weights() const { return weights_; }
  const ModelWeights& modelWeights() const { return modelWeights_; }
  const ArcLinearization& linearization(int arc) const { return linearization_.at(arc); }
  bool available(int mode, std::size_t t) const { return available_.at(t).at(mode); }
  std::size_t positions() const { return scenario_.positions(); }

  /// Copy with every slack weight multiplied by `factor`.
  StationProblem withSlackScale(double factor) const;

 private:
  StationSpec spec_;
  Scenario scenario_;
  ObjectiveWeights weights_;
  ModelWeights modelWeights_{};
  std::vector<ArcLinearization> linearization_;
  std::vector<std::vector<bool>> available_;
};

std::vector<ArcLinearization> linearizationConstants(const StationSpec& spec, const State& initial);

/// How the operation mode and flow direction of a variable slice are chosen.
struct SliceModes {
  std::vector<int> candidates;  // modes that may be selected; others fixed to 0
  bool fixed = false;           // exactly one candidate, fixed to 1
  int direction = -1;           // fixed direction, or -1 to leave it free
  bool pinned = false;          // keep om/fd binaries but fix their bounds (full P audits)
};

/// Emits the element, station logic, slack and change rows of the station
/// model into a ModelBuilder. Variants differ only in which slices they
/// create and which families they emit.
class ModelAssembler {
 public:
  ModelAssembler(const StationProblem& problem, Variant variant, std::string name);

  const TimeSlice& addFixedSlice(const State& state, std::size_t time);
  /// Only mode-dependent entries (om, switches) from `mode`; used as the
  /// predecessor of stationary models.
  const TimeSlice& addModeSlice(int mode, std::size_t time);
  const TimeSlice& addVariableSlice(std::size_t time, const SliceModes& modes, bool stationary);

  void emitCompressorStation(int arc, const TimeSlice& slice);
  void emitPipe(int arc, const TimeSlice& previous, const TimeSlice& current, bool transient);
  void emitResistor(int arc, const TimeSlice& slice);
  void emitValve(int arc, const TimeSlice& slice);
  void emitRegulator(int arc, const TimeSlice& slice);
  void emitNodeBalance(int node, const TimeSlice& slice);
  void emitStationLogic(const TimeSlice& slice);
  void emitSlacks(const TimeSlice& slice);
  void emitChangeTracking(const TimeSlice& previous, const TimeSlice& current, bool operatingPoints);

  /// Every element, balance, logic and slack family for one step.
  void emitStep(const TimeSlice& previous, const TimeSlice& current, bool transient);

  void scaleSlacks(double factor) { slackScale_ = factor; }
  std::size_t rowCount() const { return builder_.rowCount(); }
  const std::deque<TimeSlice>& slices() const { return slices_; }
  ModelInstance finish() &&;

 private:
  Quantity variable(std::string name, double lower, double upper, VarType type, VariableRole role,
                    CostCategory category = CostCategory::None);
  std::string tag(std::string_view family, std::string_view entity, std::size_t time) const;
  double pressureLB(int node, std::size_t t) const;
  double pressureUB(int node, std::size_t t) const;
  double flowLB(int arc, std::size_t t) const;
  double flowUB(int arc, std::size_t t) const;
  double stepLength(std::size_t t) const;
  void emitStationDirect(int arc, const TimeSlice& slice);
  void emitSwitchCoupling(const TimeSlice& slice);

  const StationProblem& problem_;
  Variant variant_;
  ModelBuilder builder_;
  std::deque<TimeSlice> slices_;
  double slackScale_ = 1.0;
  double flowCap_ = 0.0;
};

struct FullModelOptions {
  std::optional<ModeSequence> fixedSequence;  // pins om and fd binaries
};

ModelInstance buildFullModel(const StationProblem& problem, const FullModelOptions& options = {});

ModelInstance buildStationaryModel(const StationProblem& problem, std::size_t time,
                                   const std::vector<int>& validModes, int previousMode);

ModelInstance buildStationaryFixedModel(const StationProblem& problem, std::size_t time, int mode,
                                        int previousMode);

struct WindowModes {
  std::size_t start = 0;        // position holding `startState`
  State startState;
  std::vector<int> modes;       // positions start+1 .. start+n
  std::vector<int> directions;
  double slackScale = 1.0;
};

ModelInstance buildTransientFixedModel(const StationProblem& problem, const WindowModes& window);

/// Reads the model's pressures, flows and switch states back, one State per
/// variable time position (in order).
std::vector<State> extractStates(const StationProblem& problem, const ModelInstance& model,
                                 const std::vector<double>& solution);

/// Writes the states and sequence of a plan into `model`'s variable space,
/// deriving slacks, change indicators and copies.
std::vector<double> assignmentFromPlan(const StationProblem& problem, const ModelInstance& model,
                                       const std::vector<State>& states,
                                       const ModeSequence& sequence);

}  // namespace netstation
