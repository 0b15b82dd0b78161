#pragma once

#include <vector>

#include "panelrom/fe_model.hpp"

namespace panelrom {

struct StaticOptions {
  int load_steps = 1;
  double tol_rel = 1e-8;   // residual tolerance relative to max(load norm, 1 N)
  int max_iter = 50;
  int max_halvings = 4;    // automatic step halving on divergence
  bool geometric_nonlinear = true;
};

struct StaticStepRecord {
  double load_fraction = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct StaticTrace {
  std::vector<StaticStepRecord> steps;
  bool converged = false;
  double last_converged_fraction = 0.0;
};

// Incremental Newton solve of f_int(q) = f_ext with optional extra pinned
// free DOFs (displacement zero). Throws ErrCode::solver on divergence; the
// trace carries the last converged load fraction for the caller's retry
// logic.
Vec solve_nonlinear_static(const FullOrderModel& model, const Vec& f_ext,
                           const std::vector<Index>& extra_fixed, const StaticOptions& opt,
                           StaticTrace* trace = nullptr, const Vec* q_start = nullptr);

// Applies homogeneous constraints on assembled operators: zeroed rows and
// columns with a unit diagonal. Keeps vector lengths unchanged.
void apply_mask(SpMat& A, const std::vector<Index>& pinned);
void apply_mask(Vec& v, const std::vector<Index>& pinned);

} // namespace panelrom
