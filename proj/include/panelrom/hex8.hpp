#pragma once

#include <array>

#include "panelrom/types.hpp"

namespace panelrom::hex8 {

// Trilinear 8-node hexahedron, total Lagrangian St. Venant-Kirchhoff,
// full 2x2x2 Gauss quadrature. Nodal quantities are 8x3 matrices (one row
// per node).

using NodeMat = Eigen::Matrix<double, 8, 3>;
using ElemVec = Eigen::Matrix<double, 24, 1>;
using ElemMat = Eigen::Matrix<double, 24, 24>;

struct QuadPoint {
  Eigen::Matrix<double, 8, 1> N;    // shape values
  Eigen::Matrix<double, 8, 3> dNdX; // reference gradients
  double wdet = 0.0;                // quadrature weight * det J
};

struct ElemData {
  std::array<QuadPoint, 8> qp;
  double volume = 0.0;
};

// Precomputes shape gradients and weights; throws on non-positive Jacobian.
ElemData precompute(const NodeMat& X, int elem_id = -1);

double min_jacobian(const NodeMat& X);

// Green-Lagrange based internal force and (exact) consistent tangent.
// Throws on element inversion (non-positive deformed Jacobian).
void internal_force(const ElemData& ed, const NodeMat& u, double lambda, double mu,
                    NodeMat* f, ElemMat* K, int elem_id = -1);

// Geometric (initial-stress) stiffness from the small-strain stress of u.
ElemMat geometric_stiffness(const ElemData& ed, const NodeMat& u, double lambda, double mu);

// Consistent mass, scaled by density (mass units per volume).
ElemMat mass(const ElemData& ed, double rho);

// Max von Mises measure of the second Piola-Kirchhoff stress over the
// quadrature points; optionally reports the quadrature point location weight.
double max_von_mises(const ElemData& ed, const NodeMat& u, double lambda, double mu);

// St. Venant-Kirchhoff strain energy.
double strain_energy(const ElemData& ed, const NodeMat& u, double lambda, double mu);

} // namespace panelrom::hex8
