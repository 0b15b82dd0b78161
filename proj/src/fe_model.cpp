#include "panelrom/fe_model.hpp"

#include <algorithm>
#include <set>

#include "panelrom/error.hpp"

namespace panelrom {

FullOrderModel::FullOrderModel(Mesh mesh, Material mat, std::vector<int> fixed_global_dofs)
    : mesh_(std::move(mesh)), mat_(std::move(mat)) {
  mat_.validate();
  mesh_.validate();
  const Index n_dofs = 3 * mesh_.n_nodes();
  std::set<int> fixed(fixed_global_dofs.begin(), fixed_global_dofs.end());
  for (int d : fixed) require(d >= 0 && d < n_dofs, ErrCode::invalid, "fixed DOF out of range");
  dof_map_.assign(static_cast<std::size_t>(n_dofs), -1);
  for (Index d = 0; d < n_dofs; ++d) {
    if (fixed.count(static_cast<int>(d))) continue;
    dof_map_[static_cast<std::size_t>(d)] = n_free_;
    free_to_global_.push_back(static_cast<int>(d));
    ++n_free_;
  }
  q0_ = Vec::Zero(n_free_);

  edata_.reserve(static_cast<std::size_t>(mesh_.n_elements()));
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    hex8::NodeMat X;
    const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a) X.row(a) = mesh_.nodes.row(conn[static_cast<std::size_t>(a)]);
    edata_.push_back(hex8::precompute(X, static_cast<int>(e)));
  }

  // Linear stiffness = exact tangent at the reference configuration.
  const double lambda = mat_.lambda(), mu = mat_.mu(), rho = mat_.rho_mass();
  std::vector<Triplet> km, mm;
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
    hex8::NodeMat u0 = hex8::NodeMat::Zero();
    hex8::ElemMat Ke;
    hex8::internal_force(edata_[static_cast<std::size_t>(e)], u0, lambda, mu, nullptr, &Ke,
                         static_cast<int>(e));
    const hex8::ElemMat Me = hex8::mass(edata_[static_cast<std::size_t>(e)], rho);
    for (int a = 0; a < 8; ++a)
      for (int ca = 0; ca < 3; ++ca) {
        const Index ia = free_index(conn[static_cast<std::size_t>(a)], ca);
        if (ia < 0) continue;
        for (int b = 0; b < 8; ++b)
          for (int cb = 0; cb < 3; ++cb) {
            const Index ib = free_index(conn[static_cast<std::size_t>(b)], cb);
            if (ib < 0) continue;
            km.emplace_back(ia, ib, Ke(3 * a + ca, 3 * b + cb));
            mm.emplace_back(ia, ib, Me(3 * a + ca, 3 * b + cb));
          }
      }
  }
  K_.resize(n_free_, n_free_);
  K_.setFromTriplets(km.begin(), km.end());
  M_.resize(n_free_, n_free_);
  M_.setFromTriplets(mm.begin(), mm.end());
}

void FullOrderModel::set_q0(const Vec& q0) {
  require(q0.size() == n_free_, ErrCode::invalid, "q0 dimension mismatch");
  q0_ = q0;
}

hex8::NodeMat FullOrderModel::elem_disp(const Vec& q_nodal, Index e) const {
  hex8::NodeMat u;
  const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
  for (int a = 0; a < 8; ++a)
    for (int c = 0; c < 3; ++c) u(a, c) = q_nodal(3 * conn[static_cast<std::size_t>(a)] + c);
  return u;
}

Vec FullOrderModel::internal_force(const Vec& q) const {
  require(q.size() == n_free_, ErrCode::invalid, "state dimension mismatch");
  Vec q_nodal = expand(q + q0_);
  Vec f_nodal = Vec::Zero(3 * mesh_.n_nodes());
  const double lambda = mat_.lambda(), mu = mat_.mu();
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    hex8::NodeMat fe;
    hex8::internal_force(edata_[static_cast<std::size_t>(e)], elem_disp(q_nodal, e), lambda, mu,
                         &fe, nullptr, static_cast<int>(e));
    const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) f_nodal(3 * conn[static_cast<std::size_t>(a)] + c) += fe(a, c);
  }
  return restrict_full(f_nodal);
}

void FullOrderModel::internal_force_and_tangent(const Vec& q, Vec& f, SpMat& K_T) const {
  require(q.size() == n_free_, ErrCode::invalid, "state dimension mismatch");
  Vec q_nodal = expand(q + q0_);
  Vec f_nodal = Vec::Zero(3 * mesh_.n_nodes());
  const double lambda = mat_.lambda(), mu = mat_.mu();
  std::vector<Triplet> kt;
  kt.reserve(static_cast<std::size_t>(mesh_.n_elements()) * 576);
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    hex8::NodeMat fe;
    hex8::ElemMat Ke;
    hex8::internal_force(edata_[static_cast<std::size_t>(e)], elem_disp(q_nodal, e), lambda, mu,
                         &fe, &Ke, static_cast<int>(e));
    const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) f_nodal(3 * conn[static_cast<std::size_t>(a)] + c) += fe(a, c);
    for (int a = 0; a < 8; ++a)
      for (int ca = 0; ca < 3; ++ca) {
        const Index ia = free_index(conn[static_cast<std::size_t>(a)], ca);
        if (ia < 0) continue;
        for (int b = 0; b < 8; ++b)
          for (int cb = 0; cb < 3; ++cb) {
            const Index ib = free_index(conn[static_cast<std::size_t>(b)], cb);
            if (ib < 0) continue;
            kt.emplace_back(ia, ib, Ke(3 * a + ca, 3 * b + cb));
          }
      }
  }
  f = restrict_full(f_nodal);
  K_T.resize(n_free_, n_free_);
  K_T.setFromTriplets(kt.begin(), kt.end());
}

SpMat FullOrderModel::geometric_stiffness(const Vec& q_lin) const {
  require(q_lin.size() == n_free_, ErrCode::invalid, "state dimension mismatch");
  Vec q_nodal = expand(q_lin);
  const double lambda = mat_.lambda(), mu = mat_.mu();
  std::vector<Triplet> kg;
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    const hex8::ElemMat KGe =
        hex8::geometric_stiffness(edata_[static_cast<std::size_t>(e)], elem_disp(q_nodal, e), lambda, mu);
    const auto& conn = mesh_.elements[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a)
      for (int ca = 0; ca < 3; ++ca) {
        const Index ia = free_index(conn[static_cast<std::size_t>(a)], ca);
        if (ia < 0) continue;
        for (int b = 0; b < 8; ++b)
          for (int cb = 0; cb < 3; ++cb) {
            const Index ib = free_index(conn[static_cast<std::size_t>(b)], cb);
            if (ib < 0) continue;
            kg.emplace_back(ia, ib, KGe(3 * a + ca, 3 * b + cb));
          }
      }
  }
  SpMat KG(n_free_, n_free_);
  KG.setFromTriplets(kg.begin(), kg.end());
  return KG;
}

double FullOrderModel::max_von_mises(const Vec& q, int* elem_id) const {
  Vec q_nodal = expand(q + q0_);
  const double lambda = mat_.lambda(), mu = mat_.mu();
  double mx = 0.0;
  int at = -1;
  for (Index e = 0; e < mesh_.n_elements(); ++e) {
    const double s =
        hex8::max_von_mises(edata_[static_cast<std::size_t>(e)], elem_disp(q_nodal, e), lambda, mu);
    if (s > mx) {
      mx = s;
      at = static_cast<int>(e);
    }
  }
  if (elem_id) *elem_id = at;
  return mx;
}

double FullOrderModel::strain_energy(const Vec& q) const {
  Vec q_nodal = expand(q + q0_);
  const double lambda = mat_.lambda(), mu = mat_.mu();
  double w = 0.0;
  for (Index e = 0; e < mesh_.n_elements(); ++e)
    w += hex8::strain_energy(edata_[static_cast<std::size_t>(e)], elem_disp(q_nodal, e), lambda, mu);
  return w;
}

Vec FullOrderModel::expand(const Vec& q_free) const {
  Vec out = Vec::Zero(3 * mesh_.n_nodes());
  for (Index i = 0; i < n_free_; ++i) out(free_to_global_[static_cast<std::size_t>(i)]) = q_free(i);
  return out;
}

Vec FullOrderModel::restrict_full(const Vec& q_nodal) const {
  Vec out(n_free_);
  for (Index i = 0; i < n_free_; ++i) out(i) = q_nodal(free_to_global_[static_cast<std::size_t>(i)]);
  return out;
}

Vec FullOrderModel::direction_mask(int comp) const {
  Vec out = Vec::Zero(n_free_);
  for (Index i = 0; i < n_free_; ++i)
    if (free_to_global_[static_cast<std::size_t>(i)] % 3 == comp) out(i) = 1.0;
  return out;
}

std::vector<int> fix_dofs(const std::vector<int>& nodes, std::initializer_list<int> comps) {
  std::vector<int> out;
  for (int n : nodes)
    for (int c : comps) out.push_back(3 * n + c);
  return out;
}

} // namespace panelrom
