#include "netstation/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace netstation {

std::string_view categoryName(CostCategory category) {
  switch (category) {
    case CostCategory::PressureSlack: return "pressureSlack";
    case CostCategory::FlowSlack: return "flowSlack";
    case CostCategory::ModeChange: return "modeChange";
    case CostCategory::RegulatorModeChange: return "regulatorModeChange";
    case CostCategory::UnitStart: return "unitStart";
    case CostCategory::RegulatorInletChange: return "regulatorInletChange";
    case CostCategory::RegulatorOutletChange: return "regulatorOutletChange";
    case CostCategory::RegulatorFlowChange: return "regulatorFlowChange";
    case CostCategory::StationInletChange: return "stationInletChange";
    case CostCategory::StationOutletChange: return "stationOutletChange";
    case CostCategory::StationFlowChange: return "stationFlowChange";
    case CostCategory::None: return "none";
  }
  return "?";
}

double ObjectiveBreakdown::total() const {
  double sum = 0.0;
  for (double v : byCategory) sum += v;
  return sum;
}

ObjectiveBreakdown& ObjectiveBreakdown::operator+=(const ObjectiveBreakdown& other) {
  for (std::size_t i = 0; i < kCostCategoryCount; ++i) byCategory[i] += other.byCategory[i];
  return *this;
}

LinExpr& LinExpr::add(Quantity q, double coef) {
  if (coef == 0.0) return *this;
  if (q.isVariable()) {
    terms_.push_back({q.var, coef});
  } else {
    constant_ += coef * q.value;
  }
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const Term& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double factor) {
  for (Term& t : terms_) t.coef *= factor;
  constant_ *= factor;
  return *this;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double factor, LinExpr e) { return e *= factor; }

std::string_view variantName(Variant variant) {
  switch (variant) {
    case Variant::Full: return "P";
    case Variant::Stationary: return "Ps";
    case Variant::StationaryFixed: return "Psf";
    case Variant::TransientFixed: return "Pf";
  }
  throw std::invalid_argument("unknown model variant");
}

double ModelInstance::objectiveValue(const std::vector<double>& x) const {
  double value = objectiveConstant();
  for (std::size_t i = 0; i < objective.size(); ++i) value += objective[i] * x.at(i);
  return value;
}

ObjectiveBreakdown ModelInstance::breakdown(const std::vector<double>& x) const {
  ObjectiveBreakdown out = fixedCost;
  for (std::size_t i = 0; i < objective.size(); ++i) {
    if (objective[i] != 0.0) out[variables[i].category] += objective[i] * x.at(i);
  }
  return out;
}

int ModelInstance::findVariable(std::string_view name) const {
  if (index_.size() != variables.size()) {
    index_.clear();
    for (std::size_t i = 0; i < variables.size(); ++i) {
      index_.emplace(variables[i].name, static_cast<int>(i));
    }
  }
  const auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

std::size_t ModelInstance::binaryCount() const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(), [](const auto& v) {
    return v.type == VarType::Binary;
  }));
}

ModelBuilder::ModelBuilder(Variant variant, std::string name) {
  model_.variant = variant;
  model_.name = std::move(name);
}

Quantity ModelBuilder::addVariable(std::string name, double lower, double upper, VarType type,
                                   CostCategory category) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw std::invalid_argument("variable '" + name + "' needs finite bounds");
  }
  if (lower > upper) {
    throw std::invalid_argument("variable '" + name + "' has crossing bounds");
  }
  const int index = static_cast<int>(model_.variables.size());
  if (!names_.emplace(name, index).second) {
    throw std::logic_error("duplicate variable name '" + name + "'");
  }
  model_.variables.push_back({std::move(name), lower, upper, type, category});
  model_.roles.emplace_back();
  model_.objective.push_back(0.0);
  return Quantity::variable(index);
}

void ModelBuilder::setRole(Quantity q, VariableRole role) {
  if (q.isVariable()) model_.roles[q.var] = role;
}

void ModelBuilder::addRow(std::string name, const LinExpr& expr, double lower, double upper) {
  std::map<int, double> merged;
  for (const Term& t : expr.terms()) merged[t.var] += t.coef;
  Row row{std::move(name), {}, lower - expr.constant(), upper - expr.constant()};
  double scale = 1.0;
  for (const auto& [var, coef] : merged) {
    if (coef != 0.0) {
      row.terms.push_back({var, coef});
      scale = std::max(scale, std::abs(coef));
    }
  }
  for (const Term& t : row.terms) {
    if (!std::isfinite(t.coef)) throw std::logic_error("non-finite coefficient in row '" + row.name + "'");
  }
  if (row.terms.empty()) {
    const double tol = 1e-9 * std::max({1.0, std::abs(row.lower), std::abs(row.upper)});
    if (row.lower > tol || row.upper < -tol) {
      markInfeasible("constant row '" + row.name + "' cannot hold");
    }
    return;
  }
  if (!rowNames_.emplace(row.name, static_cast<int>(model_.rows.size())).second) {
    throw std::logic_error("duplicate row name '" + row.name + "'");
  }
  model_.rows.push_back(std::move(row));
}

void ModelBuilder::addLessEqual(std::string name, const LinExpr& expr, double rhs) {
  addRow(std::move(name), expr, -std::numeric_limits<double>::infinity(), rhs);
}

void ModelBuilder::addGreaterEqual(std::string name, const LinExpr& expr, double rhs) {
  addRow(std::move(name), expr, rhs, std::numeric_limits<double>::infinity());
}

void ModelBuilder::addCost(Quantity q, double weight, CostCategory category) {
  if (weight == 0.0) return;
  if (q.isVariable()) {
    model_.objective[q.var] += weight;
    model_.variables[q.var].category = category;
  } else {
    model_.fixedCost[category] += weight * q.value;
  }
}

void ModelBuilder::markInfeasible(std::string reason) {
  if (!model_.knownInfeasible) {
    model_.knownInfeasible = true;
    model_.infeasibilityReason = std::move(reason);
  }
}

ModelInstance ModelBuilder::finish() && { return std::move(model_); }

}  // namespace netstation
