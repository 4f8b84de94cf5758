#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// Solver-independent MIP container: variables with bounds, ranged linear rows
// lower <= a . x <= upper, and a minimized linear objective.

namespace netstation {

enum class VarType { Continuous, Binary };

enum class CostCategory {
  PressureSlack,
  FlowSlack,
  ModeChange,
  RegulatorModeChange,
  UnitStart,
  RegulatorInletChange,
  RegulatorOutletChange,
  RegulatorFlowChange,
  StationInletChange,
  StationOutletChange,
  StationFlowChange,
  None,
};
inline constexpr std::size_t kCostCategoryCount = 11;
std::string_view categoryName(CostCategory category);

struct ObjectiveBreakdown {
  std::array<double, kCostCategoryCount> byCategory{};
  double total() const;
  double& operator[](CostCategory c) { return byCategory[static_cast<std::size_t>(c)]; }
  double operator[](CostCategory c) const { return byCategory[static_cast<std::size_t>(c)]; }
  ObjectiveBreakdown& operator+=(const ObjectiveBreakdown& other);
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarType type = VarType::Continuous;
  CostCategory category = CostCategory::None;
};

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  double lower = 0.0;
  double upper = 0.0;
};

/// Either a model variable or a fixed value (time-0 data, fixed binaries).
struct Quantity {
  int var = -1;
  double value = 0.0;

  bool isVariable() const { return var >= 0; }
  static Quantity constant(double value) { return {-1, value}; }
  static Quantity variable(int index) { return {index, 0.0}; }
};

class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT implicit by design
  LinExpr(Quantity q) { add(q, 1.0); }                // NOLINT

  LinExpr& add(Quantity q, double coef);
  LinExpr& add(double value) {
    constant_ += value;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double factor);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool isConstant() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double factor, LinExpr e);

enum class Variant { Full, Stationary, StationaryFixed, TransientFixed };
std::string_view variantName(Variant variant);

/// Handles of one time position. Entries unused by an arc kind stay constant 0.
struct StationCopies {
  Quantity bypass, closed;
  Quantity bypassPressure, bypassFlow, closedInlet, closedOutlet;
  std::vector<Quantity> config, configInlet, configOutlet, configFlow;
};

struct RegulatorSwitch {
  Quantity closed, bypass, active;
};

struct TimeSlice {
  std::size_t time = 0;
  bool fixed = false;  // every entry a constant
  std::vector<Quantity> pressure;  // per node
  std::vector<Quantity> inflow;
  std::vector<Quantity> flowIn;    // per arc; same handle as flowOut except for transient pipes
  std::vector<Quantity> flowOut;
  std::vector<StationCopies> stations;
  std::vector<Quantity> valveOpen;
  std::vector<RegulatorSwitch> regulators;
  std::vector<Quantity> mode;
  std::vector<Quantity> direction;
};

struct VariableCatalog {
  std::vector<TimeSlice> slices;  // slice 0 holds the fixed predecessor state
  double value(Quantity q, const std::vector<double>& x) const {
    return q.isVariable() ? x.at(q.var) : q.value;
  }
};

/// What a variable stands for, so solutions can be read back into states and
/// plans can be written into a model's variable space.
enum class RoleKind {
  Pressure, Inflow, FlowIn, FlowOut,
  StationBypass, StationClosed, StationConfig,
  BypassPressure, BypassFlow, ClosedInletPressure, ClosedOutletPressure,
  ConfigInletPressure, ConfigOutletPressure, ConfigFlow,
  ValveOpen, RegulatorClosed, RegulatorBypass, RegulatorActive,
  Mode, Direction,
  PressureSlackUp, PressureSlackDown, FlowSlackUp, FlowSlackDown,
  ModeChange, RegulatorChange, UnitStart,
  RegulatorInletChange, RegulatorOutletChange, RegulatorFlowChange,
  StationInletChange, StationOutletChange, StationFlowChange,
};

struct VariableRole {
  RoleKind kind = RoleKind::Pressure;
  int entity = -1;  // node, arc, mode or direction index
  int sub = -1;     // configuration or unit index
  int time = -1;    // global time position
};

struct ModelInstance {
  Variant variant = Variant::Full;
  std::string name;
  std::vector<Variable> variables;
  std::vector<VariableRole> roles;  // parallel to variables
  VariableCatalog catalog;
  std::vector<Row> rows;
  std::vector<double> objective;  // per variable
  ObjectiveBreakdown fixedCost;   // contributions of fixed quantities
  bool knownInfeasible = false;
  std::string infeasibilityReason;
  std::optional<std::vector<double>> warmStart;

  double objectiveConstant() const { return fixedCost.total(); }
  double objectiveValue(const std::vector<double>& x) const;
  ObjectiveBreakdown breakdown(const std::vector<double>& x) const;
  int findVariable(std::string_view name) const;  // -1 if absent
  std::size_t binaryCount() const;

 private:
  mutable std::unordered_map<std::string, int> index_;
};

/// Incremental construction with name-collision detection and folding of
/// constant rows.
class ModelBuilder {
 public:
  ModelBuilder(Variant variant, std::string name);

  Quantity addVariable(std::string name, double lower, double upper, VarType type,
                       CostCategory category = CostCategory::None);
  Quantity addBinary(std::string name, CostCategory category = CostCategory::None) {
    return addVariable(std::move(name), 0.0, 1.0, VarType::Binary, category);
  }
  void setRole(Quantity q, VariableRole role);
  ModelInstance& model() { return model_; }

  /// lower <= expr <= upper. Rows without variables are checked and dropped.
  void addRow(std::string name, const LinExpr& expr, double lower, double upper);
  void addEquality(std::string name, const LinExpr& expr, double rhs = 0.0) {
    addRow(std::move(name), expr, rhs, rhs);
  }
  void addLessEqual(std::string name, const LinExpr& expr, double rhs = 0.0);
  void addGreaterEqual(std::string name, const LinExpr& expr, double rhs = 0.0);

  /// Adds weight * q to the objective under `category`.
  void addCost(Quantity q, double weight, CostCategory category);

  void markInfeasible(std::string reason);
  std::size_t rowCount() const { return model_.rows.size(); }
  const ModelInstance& peek() const { return model_; }
  ModelInstance finish() &&;

 private:
  ModelInstance model_;
  std::unordered_map<std::string, int> names_;
  std::unordered_map<std::string, int> rowNames_;
};

}  // namespace netstation
