#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "panelrom/types.hpp"

namespace panelrom {

// 8-node hexahedral mesh. Node coordinates in mm. Connectivity uses the
// usual ordering: bottom face counterclockwise (seen from +z of the element
// frame), then top face.
struct Mesh {
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;
  std::vector<std::array<int, 8>> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> element_sets;

  Index n_nodes() const { return nodes.rows(); }
  Index n_elements() const { return static_cast<Index>(elements.size()); }

  const std::vector<int>& node_set(const std::string& name) const;

  // Checks connectivity bounds, distinct nodes per element, positive
  // Jacobians at all quadrature points and node-set validity.
  void validate() const;

  void write(const std::string& path) const;
  static Mesh read(const std::string& path);
};

// Structured box grid from explicit 1D coordinate arrays. Node numbering is
// lexicographic by grid index: i (x) outermost, then j (y), then k (z).
Mesh structured_box(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<double>& zs);

// 1D grid over [a, b] with n elements whose sizes follow a geometric
// progression; `grading` is the ratio of the first to the last element size
// (> 1 refines towards b).
std::vector<double> graded_axis(double a, double b, int n, double grading);

// Nodes of a structured_box mesh lying on the plane coord[axis] == value.
std::vector<int> nodes_on_plane(const Mesh& mesh, int axis, double value, double tol = 1e-9);

// Appends `other` to `base`; returns the node-id offset applied to `other`.
int append_mesh(Mesh& base, const Mesh& other);

} // namespace panelrom
