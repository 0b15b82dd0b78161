#pragma once

#include <memory>
#include <string>
#include <vector>

#include "panelrom/fe_model.hpp"
#include "panelrom/interface_basis.hpp"

namespace panelrom {

enum class RegionKind { support, thin_walled };

// Conforming contact node pairs (upper, lower) with node-based quadrature
// weights and in-plane coordinates for pressure-distribution evaluation.
struct ContactGeometry {
  std::vector<std::pair<int, int>> pairs;
  Vec weight;      // mm^2, per pair
  Mat coords;      // n x 2, in-plane position on the contact plane
  int normal_comp = 2; // gap-triple component along the contact normal

  Index n_pairs() const { return static_cast<Index>(pairs.size()); }
  bool empty() const { return pairs.empty(); }
};

// Region model in solver coordinates. For regions with contact pairs the
// paired absolute DOFs are replaced by relative (gap) and mean coordinates,
// q_nodal = V q; gap components enter partition b, means stay internal.
struct TransformedModel {
  std::shared_ptr<const FullOrderModel> model;
  SpMat V;            // identity when no pairs
  bool has_transform = false;
  SpMat M, K;         // transformed operators
  std::vector<Index> gap_dofs; // 3 per pair: (x, y, z) relative components
  ContactGeometry contact;

  Index dim() const { return model->n_free(); }
  // Internal force (and exact tangent) in transformed coordinates.
  void force_and_tangent(const Vec& q, Vec& f, SpMat* K_T, bool geometric_nonlinear) const;
  Vec project_load(const Vec& f_free) const;  // V^T f
  Vec lift(const Vec& q_coord) const;         // V q
  Vec restrict_coord(const Vec& q_free) const; // V^{-1} q (pairs only)
};

TransformedModel make_transformed(std::shared_ptr<const FullOrderModel> model,
                                  ContactGeometry contact = {});

// Contact geometry for conforming meshes: pairs matched by in-plane position
// on the plane coord[normal_dir] == value, weights from the upper-side faces.
ContactGeometry build_contact_geometry(const Mesh& mesh, const std::string& upper_set,
                                       const std::string& lower_set, int normal_dir);

struct DofPartition {
  std::vector<Index> b;        // contact gap coordinates (support regions)
  std::vector<Index> gamma;    // interface DOFs, patch node order x (x,y,z)
  std::vector<Index> interior; // everything else
};

DofPartition make_partition(const TransformedModel& tm, const InterfacePatch& patch);

struct ComponentBasis {
  RegionKind kind = RegionKind::thin_walled;
  Index n_b = 0, n_gamma = 0, n_modes = 0;
  Mat T; // dim x (n_b + n_gamma + n_modes), block structure of the reduction
  DofPartition partition;
  Vec theta_lambda;              // fixed-interface eigenvalues ((rad/s)^2)
  std::vector<bool> strain_free; // per reduced coordinate (rigid-body tagged)
  std::vector<std::string> gamma_labels;

  Index dim_reduced() const { return n_b + n_gamma + n_modes; }
};

// Fixed-interface normal modes, contact-boundary constraint modes and
// reduced-interface constraint modes sharing one factorization of K_ii. The
// product Psi_Gamma * Gamma is computed directly from the reduced right-hand
// side. Optional target frequency band (Hz) filters the normal modes.
ComponentBasis compute_component_basis(const TransformedModel& tm, const InterfacePatch& patch,
                                       const InterfaceBasis& basis, Index m_gamma, Index n_modes,
                                       RegionKind kind, double band_lo_hz = 0.0,
                                       double band_hi_hz = 0.0);

struct ReducedComponent {
  RegionKind kind = RegionKind::thin_walled;
  Index n_b = 0, n_gamma = 0, n_modes = 0;
  Mat Mred, Kred;
  Mat T;
  std::vector<bool> strain_free;
  std::vector<std::string> gamma_labels;
  Mat base_load;  // dim_reduced x 3, reduced M * (unit acceleration field)
  Mat probe_rows; // n_probes x dim_reduced
  std::vector<std::string> probe_labels;
  ContactGeometry contact;

  Index dim_reduced() const { return n_b + n_gamma + n_modes; }
};

struct ProbeSpec {
  int node = 0;
  int comp = 2;
  std::string label;
};

ReducedComponent reduce_component(const TransformedModel& tm, const ComponentBasis& basis,
                                  const std::vector<ProbeSpec>& probes = {});

} // namespace panelrom
