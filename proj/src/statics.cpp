#include "panelrom/statics.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "panelrom/error.hpp"

namespace panelrom {

void apply_mask(SpMat& A, const std::vector<Index>& pinned) {
  if (pinned.empty()) return;
  std::vector<char> mask(static_cast<std::size_t>(A.rows()), 0);
  for (Index p : pinned) mask[static_cast<std::size_t>(p)] = 1;
  for (Index k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      if (mask[static_cast<std::size_t>(it.row())] || mask[static_cast<std::size_t>(it.col())])
        it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  // Ensure a diagonal entry exists for every pinned DOF.
  for (Index p : pinned) A.coeffRef(p, p) = 1.0;
  A.prune(0.0);
}

void apply_mask(Vec& v, const std::vector<Index>& pinned) {
  for (Index p : pinned) v(p) = 0.0;
}

namespace {

struct NewtonResult {
  bool ok = false;
  int iterations = 0;
  double residual = 0.0;
};

NewtonResult newton_solve(const FullOrderModel& model, const Vec& f_target,
                          const std::vector<Index>& pinned, const StaticOptions& opt, Vec& q) {
  NewtonResult res;
  const double ref = std::max(f_target.norm(), 1.0);
  Vec f;
  SpMat K_T;
  for (int it = 0; it < opt.max_iter; ++it) {
    Vec r;
    try {
      if (opt.geometric_nonlinear) {
        model.internal_force_and_tangent(q, f, K_T);
      } else {
        K_T = model.K();
        f = K_T * q;
      }
    } catch (const Error&) {
      return res; // element inversion counts as divergence for stepping
    }
    r = f - f_target;
    apply_mask(r, pinned);
    res.residual = r.norm();
    res.iterations = it;
    if (res.residual <= opt.tol_rel * ref) {
      res.ok = true;
      return res;
    }
    apply_mask(K_T, pinned);
    Eigen::SimplicialLDLT<SpMat> fact(K_T);
    if (fact.info() != Eigen::Success) return res; // singular tangent
    Vec dq = fact.solve(-r);
    if (!dq.allFinite()) return res;
    // Crude divergence guard: displacement updates growing without bound.
    if (dq.norm() > 1e8) return res;
    q += dq;
  }
  return res;
}

} // namespace

Vec solve_nonlinear_static(const FullOrderModel& model, const Vec& f_ext,
                           const std::vector<Index>& extra_fixed, const StaticOptions& opt,
                           StaticTrace* trace, const Vec* q_start) {
  require(f_ext.size() == model.n_free(), ErrCode::invalid, "load dimension mismatch");
  StaticTrace local;
  StaticTrace& tr = trace ? *trace : local;
  tr.steps.clear();
  tr.converged = false;
  tr.last_converged_fraction = 0.0;

  Vec q = q_start ? *q_start : Vec::Zero(model.n_free());
  apply_mask(q, extra_fixed);

  double done = 0.0;
  double step = 1.0 / std::max(opt.load_steps, 1);
  int halvings = 0;
  Vec q_good = q;
  while (done < 1.0 - 1e-12) {
    const double target = std::min(1.0, done + step);
    Vec q_try = q_good;
    NewtonResult nr = newton_solve(model, (target * f_ext).eval(), extra_fixed, opt, q_try);
    StaticStepRecord rec;
    rec.load_fraction = target;
    rec.iterations = nr.iterations;
    rec.residual = nr.residual;
    tr.steps.push_back(rec);
    if (nr.ok) {
      q_good = q_try;
      done = target;
      tr.last_converged_fraction = done;
    } else {
      ++halvings;
      step *= 0.5;
      if (halvings > opt.max_halvings) {
        fail(ErrCode::solver, "nonlinear static solve diverged at load fraction " +
                                  std::to_string(done + step * 2.0) + " (last converged " +
                                  std::to_string(done) + ")");
      }
    }
  }
  tr.converged = true;
  return q_good;
}

} // namespace panelrom
