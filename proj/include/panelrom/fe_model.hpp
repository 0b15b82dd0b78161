#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "panelrom/hex8.hpp"
#include "panelrom/material.hpp"
#include "panelrom/mesh.hpp"

namespace panelrom {

// Full-order finite element model of one region. Dirichlet-constrained DOFs
// are eliminated; all operators live on the free DOFs. Immutable after
// construction, safe to share across threads; solvers keep private state.
class FullOrderModel {
public:
  FullOrderModel(Mesh mesh, Material mat, std::vector<int> fixed_global_dofs);

  const Mesh& mesh() const { return mesh_; }
  const Material& material() const { return mat_; }

  Index n_free() const { return n_free_; }
  // Global DOF id is 3*node + component; returns -1 for constrained DOFs.
  Index free_index(int node, int comp) const { return dof_map_[static_cast<std::size_t>(3 * node + comp)]; }
  const std::vector<int>& free_to_global() const { return free_to_global_; }

  const SpMat& M() const { return M_; } // tonne-consistent
  const SpMat& K() const { return K_; } // N/mm

  const Vec& q0() const { return q0_; }
  void set_q0(const Vec& q0);

  // Total internal force (N) and exact tangent (N/mm) at free displacement q.
  // The geometrically nonlinear part is h = f_int - K q.
  Vec internal_force(const Vec& q) const;
  void internal_force_and_tangent(const Vec& q, Vec& f, SpMat& K_T) const;

  SpMat geometric_stiffness(const Vec& q_lin) const;

  double max_von_mises(const Vec& q, int* elem_id = nullptr) const;
  double strain_energy(const Vec& q) const;

  // Scatters a free vector to a full nodal field (constrained entries zero).
  Vec expand(const Vec& q_free) const;
  Vec restrict_full(const Vec& q_nodal) const;

  // Mask vector (3N) selecting nodal components along `comp`; restricted to
  // free DOFs. Used for base-acceleration load patterns.
  Vec direction_mask(int comp) const;

private:
  hex8::NodeMat elem_disp(const Vec& q_nodal, Index e) const;

  Mesh mesh_;
  Material mat_;
  std::vector<Index> dof_map_;     // 3N -> free index or -1
  std::vector<int> free_to_global_;
  Index n_free_ = 0;
  std::vector<hex8::ElemData> edata_;
  SpMat M_, K_;
  Vec q0_;
};

// Convenience: global DOF ids for (node, component) pairs.
std::vector<int> fix_dofs(const std::vector<int>& nodes, std::initializer_list<int> comps);

} // namespace panelrom
