#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace panelrom {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Unit system: mm, N, MPa, s. Mass matrices are stored in tonnes (Mg) so
// that M*q'' is in N without conversion factors; densities are configured
// in kg/mm^3 and scaled on input. Frequencies are rad/s throughout.
inline constexpr double kKgToMassUnit = 1.0e-3;

} // namespace panelrom
