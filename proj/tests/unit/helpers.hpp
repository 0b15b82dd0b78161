#pragma once

#include <random>

#include "panelrom/fe_model.hpp"
#include "panelrom/mesh.hpp"

namespace testutil {

using namespace panelrom;

inline std::vector<double> linspace(double a, double b, int n_elem) {
  std::vector<double> v(static_cast<std::size_t>(n_elem) + 1);
  for (int i = 0; i <= n_elem; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / n_elem;
  return v;
}

// Rectangular strip along x, clamped on the x = 0 face.
inline FullOrderModel cantilever_strip(double L, double W, double t, int nx, int ny, int nz,
                                       Material mat) {
  Mesh m = structured_box(linspace(0, L, nx), linspace(0, W, ny), linspace(0, t, nz));
  auto fixed_nodes = nodes_on_plane(m, 0, 0.0);
  return FullOrderModel(std::move(m), mat, fix_dofs(fixed_nodes, {0, 1, 2}));
}

// Central-difference Jacobian of a vector function.
template <typename F>
Mat fd_jacobian(const F& f, const Vec& q, double h) {
  Vec f0 = f(q);
  Mat J(f0.size(), q.size());
  for (Index j = 0; j < q.size(); ++j) {
    Vec qp = q, qm = q;
    qp(j) += h;
    qm(j) -= h;
    J.col(j) = (f(qp) - f(qm)) / (2.0 * h);
  }
  return J;
}

inline Vec random_vec(Index n, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

} // namespace testutil
