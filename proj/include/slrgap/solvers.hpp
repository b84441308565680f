#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "slrgap/model.hpp"

namespace slrgap {

struct SolverOptions {
  double lambda = -1.0;     // < 0 means "use default_lambda"
  int max_sweeps = 10000;
  double tol_kkt = 1e-8;
  bool normalize_columns = false;
  std::int64_t subset_budget = 1000000;  // best-subset enumeration budget
};

struct SolveRequest {
  const Matrix* A = nullptr;
  const Vector* y = nullptr;
  int k_hint = 0;
  double sigma2_known = 1.0;
  SolverOptions options;
};

struct SolveReport {
  Vector x_hat;
  int sweeps_used = 0;
  double kkt_residual = 0.0;
  bool converged = true;
  double lambda_used = 0.0;
  std::vector<double> objective_trace;  // one entry per sweep, non-increasing
};

// Default regularization weight: sqrt(sigma2) * sqrt(2 ln(2p)/n) * max_j ||A_j||/sqrt(n).
double default_lambda(const Matrix& A, double sigma2_known);

// Cyclic coordinate descent for (1/2n)||y - Ax||^2 + lambda ||x||_1.
// Exits when every coordinate satisfies the stationarity condition within
// tol_kkt, or when max_sweeps is reached (converged=false, not an error).
SolveReport solve_lasso(const SolveRequest& req);

// Exhaustive least squares over all supports of size <= k; ties broken by
// lexicographically smallest support. Refuses when C(p,k) exceeds the budget.
SolveReport solve_best_subset(const SolveRequest& req, int k);

// (1/n) ||A (x_hat - x_star)||^2.
double prediction_error(const Matrix& A, const Vector& x_hat, const Vector& x_star);

// Reference oracles used to isolate reduction correctness from solver quality.
SolveReport oracle_exact(const SlrInstance& inst);
SolveReport oracle_zero(const SlrInstance& inst);

// Uniform solver interface consumed by the reductions.
using SlrOracle = std::function<SolveReport(const SlrInstance&)>;

SlrOracle make_lasso_oracle(SolverOptions options = {}, double sigma2_known = 1.5);
SlrOracle make_best_subset_oracle(int k, SolverOptions options = {});
SlrOracle make_exact_oracle();
SlrOracle make_zero_oracle();

}  // namespace slrgap
