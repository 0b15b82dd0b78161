#pragma once

#include <string>
#include <vector>

#include "panelrom/mesh.hpp"
#include "panelrom/types.hpp"

namespace panelrom {

// In-plane description of a flat substructure-interface cross section.
// Coordinates are centered on the weighted centroid; weights are tributary
// nodal areas from the interface surface mesh (mm^2).
struct InterfacePatch {
  std::vector<int> node_ids; // region-mesh node ids, deterministic order
  Mat coords;                // n x 2, centered (axis1, axis2)
  Vec weights;               // > 0, sums to the interface area
  int dir_normal = 0;        // global component of the plane normal
  int dir_axis1 = 1;         // global component of in-plane axis 1
  int dir_axis2 = 2;         // global component of in-plane axis 2
  Vec3 centroid = Vec3::Zero();

  Index n_nodes() const { return static_cast<Index>(node_ids.size()); }
  void validate() const;
};

// Builds the patch from the nodes of `node_set` lying on a plane with the
// given normal direction. Tributary areas come from the element faces that
// triangulate the cross section.
InterfacePatch build_interface_patch(const Mesh& mesh, const std::string& node_set, int normal_dir);

struct PolyTerm {
  int a = 0; // exponent of axis 1
  int b = 0; // exponent of axis 2
};

// Keep only columns compatible with a response symmetric in axis 1
// (directions normal/axis2 need even exponent a, axis-1 direction odd a).
enum class SymmetryFilter { none, axis1_symmetric };

struct InterfaceColumn {
  int term = 0;           // index into terms
  int dir = 0;            // global displacement component
  bool rigid_body = false; // lies in the span of the nodal rigid-body fields
};

struct InterfaceBasis {
  std::vector<PolyTerm> terms; // ordered by total degree, then ascending a
  Mat values;                  // n_nodes x n_terms, orthogonal scalar basis
  std::vector<InterfaceColumn> columns;
  Mat gamma; // (3 * n_nodes) x n_columns, rows in node order x (x,y,z)
  int degree = 0;

  Index n_columns() const { return static_cast<Index>(columns.size()); }
  std::string column_label(Index c) const;
};

// Gram-Schmidt orthogonalization of the monomial terms x^a y^b (a+b <= P)
// under the node-weight inner product, expansion to the three translational
// DOFs per node, optional symmetry filtering, and per-column max-abs
// normalization.
InterfaceBasis build_interface_basis(const InterfacePatch& patch, int degree, SymmetryFilter filter);

// Same, with an explicit term list (e.g. tensor-product sets for exactness
// studies where the triangular set would be rank deficient).
InterfaceBasis build_interface_basis_terms(const InterfacePatch& patch,
                                           const std::vector<PolyTerm>& terms, SymmetryFilter filter);

// Dense table export with one header line naming (a, b, direction) per column.
void write_interface_basis(const std::string& path, const InterfaceBasis& basis,
                           const InterfacePatch& patch);

} // namespace panelrom
