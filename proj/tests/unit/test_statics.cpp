#include <doctest.h>

#include <thread>

#include "helpers.hpp"
#include "panelrom/eigs.hpp"
#include "panelrom/statics.hpp"

using namespace panelrom;
using namespace testutil;

namespace {
Material steel() { return Material{207000.0, 0.288, 7.829e-6}; }

FullOrderModel clamped_clamped_strip(double L, double W, double t, int nx, int ny, int nz) {
  Mesh m = structured_box(linspace(0, L, nx), linspace(0, W, ny), linspace(0, t, nz));
  auto fixed = fix_dofs(nodes_on_plane(m, 0, 0.0), {0, 1, 2});
  auto f2 = fix_dofs(nodes_on_plane(m, 0, L), {0, 1, 2});
  fixed.insert(fixed.end(), f2.begin(), f2.end());
  return FullOrderModel(std::move(m), steel(), fixed);
}

Vec center_load(const FullOrderModel& model, double total) {
  const Mesh& m = model.mesh();
  double cx = m.nodes.col(0).maxCoeff() / 2.0;
  Vec f = Vec::Zero(model.n_free());
  std::vector<int> row = nodes_on_plane(m, 0, cx, 1e-6);
  REQUIRE_MESSAGE(!row.empty(), "mesh has no mid-span node row");
  for (int n : row) {
    Index d = model.free_index(n, 2);
    if (d >= 0) f(d) = total / static_cast<double>(row.size());
  }
  return f;
}
} // namespace

TEST_CASE("zero load gives zero displacement") {
  FullOrderModel model = clamped_clamped_strip(60, 8, 1.5, 8, 1, 1);
  StaticTrace tr;
  Vec q = solve_nonlinear_static(model, Vec::Zero(model.n_free()), {}, {}, &tr);
  CHECK(q.norm() == 0.0);
  CHECK(tr.converged);
}

TEST_CASE("small loads reproduce the linear solution") {
  FullOrderModel model = clamped_clamped_strip(60, 8, 1.5, 8, 1, 1);
  // Load sized for deflection below 0.01 * thickness.
  Vec f = center_load(model, 1e-3);
  Vec q_lin = Vec(Mat(model.K()).ldlt().solve(f));
  REQUIRE(q_lin.cwiseAbs().maxCoeff() < 0.01 * 1.5);
  Vec q = solve_nonlinear_static(model, f, {}, {});
  CHECK((q - q_lin).norm() <= 0.01 * q_lin.norm());
}

TEST_CASE("membrane hardening at thickness-level deflection") {
  FullOrderModel model = clamped_clamped_strip(60, 8, 1.5, 40, 1, 1);
  Vec f_unit = center_load(model, 1.0);
  Vec q_lin1 = Vec(Mat(model.K()).ldlt().solve(f_unit));
  // Scale so the linear prediction is about one thickness.
  const double scale = 1.5 / q_lin1.cwiseAbs().maxCoeff();
  Vec f = center_load(model, scale);
  StaticOptions opt;
  opt.load_steps = 5;
  Vec q = solve_nonlinear_static(model, f, {}, opt);
  const double w_lin = 1.5;
  const double w_nl = q.cwiseAbs().maxCoeff();
  CHECK(w_nl < 0.9 * w_lin); // membrane stretching stiffens the response

  // Self-convergence: refining the load stepping does not change the result.
  StaticOptions fine = opt;
  fine.load_steps = 20;
  Vec q_fine = solve_nonlinear_static(model, f, {}, fine);
  CHECK((q - q_fine).norm() <= 1e-8 * q_fine.norm());
}

TEST_CASE("divergence reports last converged fraction") {
  FullOrderModel model = clamped_clamped_strip(60, 8, 1.5, 4, 1, 1);
  Vec f = center_load(model, 1e9); // absurd load: solver must give up
  StaticOptions opt;
  opt.max_halvings = 2;
  opt.max_iter = 12;
  StaticTrace tr;
  CHECK_THROWS_AS(solve_nonlinear_static(model, f, {}, opt, &tr), Error);
  CHECK(tr.last_converged_fraction < 1.0);
}

TEST_CASE("concurrent static solves on one shared model") {
  FullOrderModel model = clamped_clamped_strip(60, 8, 1.5, 8, 1, 1);
  std::vector<double> loads = {2e-4, 4e-4, 8e-4, 1.6e-3};
  std::vector<Vec> serial(loads.size()), parallel(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i)
    serial[i] = solve_nonlinear_static(model, center_load(model, loads[i]), {}, {});
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < loads.size(); ++i)
    threads.emplace_back([&, i] { parallel[i] = solve_nonlinear_static(model, center_load(model, loads[i]), {}, {}); });
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < loads.size(); ++i) CHECK((serial[i] - parallel[i]).norm() == 0.0);
}

TEST_CASE("linear buckling: Euler column, scaling, renumbering") {
  // Simply supported column modeled with two elements through the thickness
  // so the pin can act on the mid-layer. nu = 0 avoids width effects.
  Material mat{200000.0, 0.0, 7.8e-6};
  const double L = 60.0, W = 4.0, t = 4.0;
  const int nx = 60;
  Mesh m = structured_box(linspace(0, L, nx), linspace(0, W, 1), linspace(0, t, 2));
  std::vector<int> fixed;
  for (int n : nodes_on_plane(m, 0, 0.0))
    if (std::abs(m.nodes(n, 2) - t / 2) < 1e-9) {
      fixed.push_back(3 * n + 0);
      fixed.push_back(3 * n + 2);
    }
  for (int n : nodes_on_plane(m, 0, L))
    if (std::abs(m.nodes(n, 2) - t / 2) < 1e-9) fixed.push_back(3 * n + 2);
  // Restrain the width direction everywhere (plane problem).
  for (Index n = 0; n < m.n_nodes(); ++n) fixed.push_back(3 * static_cast<int>(n) + 1);
  FullOrderModel model(m, mat, fixed);

  const double P = 100.0;
  Vec f = Vec::Zero(model.n_free());
  auto end_nodes = nodes_on_plane(m, 0, L);
  for (int n : end_nodes) {
    Index d = model.free_index(n, 0);
    REQUIRE(d >= 0);
    // Tributary shares over 2 width nodes x 3 z-layers; corners carry half.
    const bool corner = std::abs(m.nodes(n, 2) - t / 2) > 1e-9;
    f(d) = -P * (corner ? 0.125 : 0.25);
  }
  Vec q_lin = Vec(Mat(model.K()).ldlt().solve(f));
  SpMat KG = model.geometric_stiffness(q_lin);
  BucklingResult b = buckling_factor(model.K(), KG);
  REQUIRE(b.buckles);
  const double I = W * t * t * t / 12.0;
  const double P_euler = M_PI * M_PI * mat.youngs_modulus * I / (L * L);
  CHECK(std::abs(b.gamma * P - P_euler) / P_euler < 0.10);

  // Scaling the reference load scales the factor inversely.
  Vec q2 = Vec(Mat(model.K()).ldlt().solve((2.0 * f).eval()));
  BucklingResult b2 = buckling_factor(model.K(), model.geometric_stiffness(q2));
  CHECK(b2.gamma == doctest::Approx(0.5 * b.gamma).epsilon(1e-6));

  // Invariance under node renumbering.
  {
    const Index nn = m.n_nodes();
    std::vector<int> perm(static_cast<std::size_t>(nn));
    for (Index i = 0; i < nn; ++i) perm[static_cast<std::size_t>(i)] = static_cast<int>(nn - 1 - i);
    Mesh mr;
    mr.nodes.resize(nn, 3);
    for (Index i = 0; i < nn; ++i) mr.nodes.row(perm[static_cast<std::size_t>(i)]) = m.nodes.row(i);
    for (const auto& e : m.elements) {
      std::array<int, 8> c;
      for (int a = 0; a < 8; ++a) c[static_cast<std::size_t>(a)] = perm[static_cast<std::size_t>(e[static_cast<std::size_t>(a)])];
      mr.elements.push_back(c);
    }
    std::vector<int> fixed_r;
    for (int d : fixed) fixed_r.push_back(3 * perm[static_cast<std::size_t>(d / 3)] + d % 3);
    FullOrderModel mrm(mr, mat, fixed_r);
    Vec fr = Vec::Zero(mrm.n_free());
    for (int n : end_nodes) {
      Index d = mrm.free_index(perm[static_cast<std::size_t>(n)], 0);
      REQUIRE(d >= 0);
      const bool corner = std::abs(m.nodes(n, 2) - t / 2) > 1e-9;
      fr(d) = -P * (corner ? 0.125 : 0.25);
    }
    Vec qr = Vec(Mat(mrm.K()).ldlt().solve(fr));
    BucklingResult br = buckling_factor(mrm.K(), mrm.geometric_stiffness(qr));
    CHECK(br.gamma == doctest::Approx(b.gamma).epsilon(1e-8));
  }

  // Pure transverse bending does not compress the mid-plane at linear order:
  // no buckling factor below the cutoff for a small bending load.
  FullOrderModel cant = cantilever_strip(40, 4, 4, 8, 1, 1, mat);
  Vec ft = Vec::Zero(cant.n_free());
  for (int n : nodes_on_plane(cant.mesh(), 0, 40.0)) {
    Index d = cant.free_index(n, 2);
    if (d >= 0) ft(d) = 0.01;
  }
  Vec qt = Vec(Mat(cant.K()).ldlt().solve(ft));
  BucklingResult bt = buckling_factor(cant.K(), cant.geometric_stiffness(qt), 1e4);
  CHECK_FALSE(bt.buckles);
}
