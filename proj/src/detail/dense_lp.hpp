#pragma once

#include <Eigen/Dense>

// Tiny dense LP front end over HiGHS for the geometry code.

namespace netstation::detail {

struct DenseLp {
  Eigen::VectorXd objective;  // maximized
  Eigen::MatrixXd rows;
  Eigen::VectorXd rowLower;
  Eigen::VectorXd rowUpper;
  Eigen::VectorXd colLower;   // defaults to -inf when empty
  Eigen::VectorXd colUpper;
};

struct DenseLpResult {
  enum class Status { Optimal, Infeasible, Unbounded, Failed };
  Status status = Status::Failed;
  double objective = 0.0;
  Eigen::VectorXd x;
};

DenseLpResult solveDenseLp(const DenseLp& lp);

/// Convenience: maximize c . x subject to A x <= b, x free.
DenseLpResult maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace netstation::detail
