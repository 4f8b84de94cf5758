#include "detail/dense_lp.hpp"

#include <cstdlib>
#include <limits>

#include "Highs.h"

namespace netstation::detail {

DenseLpResult solveDenseLp(const DenseLp& lp) {
  const auto cols = static_cast<HighsInt>(lp.objective.size());
  const auto rowCount = static_cast<HighsInt>(lp.rows.rows());
  const double inf = kHighsInf;

  HighsLp model;
  model.num_col_ = cols;
  model.num_row_ = rowCount;
  model.sense_ = ObjSense::kMaximize;
  model.col_cost_.assign(lp.objective.data(), lp.objective.data() + cols);
  model.col_lower_.assign(cols, -inf);
  model.col_upper_.assign(cols, inf);
  if (lp.colLower.size() == cols) model.col_lower_.assign(lp.colLower.data(), lp.colLower.data() + cols);
  if (lp.colUpper.size() == cols) model.col_upper_.assign(lp.colUpper.data(), lp.colUpper.data() + cols);
  for (HighsInt r = 0; r < rowCount; ++r) {
    const double lo = lp.rowLower[r];
    const double hi = lp.rowUpper[r];
    model.row_lower_.push_back(std::isfinite(lo) ? lo : -inf);
    model.row_upper_.push_back(std::isfinite(hi) ? hi : inf);
  }
  model.a_matrix_.format_ = MatrixFormat::kColwise;
  model.a_matrix_.num_col_ = cols;
  model.a_matrix_.num_row_ = rowCount;
  model.a_matrix_.start_.assign(1, 0);
  for (HighsInt c = 0; c < cols; ++c) {
    for (HighsInt r = 0; r < rowCount; ++r) {
      const double v = lp.rows(r, c);
      if (v != 0.0) {
        model.a_matrix_.index_.push_back(r);
        model.a_matrix_.value_.push_back(v);
      }
    }
    model.a_matrix_.start_.push_back(static_cast<HighsInt>(model.a_matrix_.index_.size()));
  }

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("presolve", "off");
  highs.setOptionValue("primal_feasibility_tolerance", 1e-10);
  highs.setOptionValue("dual_feasibility_tolerance", 1e-10);
  DenseLpResult result;
  if (highs.passModel(std::move(model)) == HighsStatus::kError || highs.run() == HighsStatus::kError) {
    return result;
  }
  switch (highs.getModelStatus()) {
    case HighsModelStatus::kOptimal: {
      result.status = DenseLpResult::Status::Optimal;
      result.objective = highs.getInfo().objective_function_value;
      const auto& values = highs.getSolution().col_value;
      result.x = Eigen::Map<const Eigen::VectorXd>(values.data(), cols);
      break;
    }
    case HighsModelStatus::kInfeasible:
      result.status = DenseLpResult::Status::Infeasible;
      break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
      result.status = DenseLpResult::Status::Unbounded;
      break;
    default:
      break;
  }
  return result;
}

DenseLpResult maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  DenseLp lp;
  lp.objective = c;
  lp.rows = a;
  lp.rowLower = Eigen::VectorXd::Constant(a.rows(), -std::numeric_limits<double>::infinity());
  lp.rowUpper = b;
  return solveDenseLp(lp);
}

}  // namespace netstation::detail
