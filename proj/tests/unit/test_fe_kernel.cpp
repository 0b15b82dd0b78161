#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "panelrom/eigs.hpp"
#include "panelrom/fe_model.hpp"

using namespace panelrom;
using namespace testutil;

namespace {
Material steel() { return Material{207000.0, 0.288, 7.829e-6}; }
} // namespace

TEST_CASE("single brick: operator sizes and rigid-body rows") {
  Mesh m = structured_box(linspace(0, 2, 1), linspace(0, 2, 1), linspace(0, 2, 1));
  FullOrderModel model(std::move(m), steel(), {});
  CHECK(model.n_free() == 24);
  CHECK(model.K().rows() == 24);
  CHECK(model.M().rows() == 24);
  const double knorm = Mat(model.K()).norm();
  for (int c = 0; c < 3; ++c) {
    Vec t = model.direction_mask(c);
    CHECK((model.K() * t).norm() <= 1e-10 * knorm);
  }
  // Mass adds up to rho * volume per direction.
  Vec tz = model.direction_mask(2);
  CHECK(tz.dot(model.M() * tz) == doctest::Approx(steel().rho_mass() * 8.0).epsilon(1e-12));
}

TEST_CASE("reference configuration: zero force, tangent equals K") {
  FullOrderModel model = cantilever_strip(20, 10, 2, 2, 1, 1, steel());
  Vec q = Vec::Zero(model.n_free());
  Vec f;
  SpMat K_T;
  model.internal_force_and_tangent(q, f, K_T);
  CHECK(f.norm() == 0.0);
  CHECK((Mat(K_T) - Mat(model.K())).norm() <= 1e-10 * Mat(model.K()).norm());
}

TEST_CASE("rigid translation leaves internal force unchanged") {
  Mesh m = structured_box(linspace(0, 20, 2), linspace(0, 10, 1), linspace(0, 2, 1));
  FullOrderModel model(std::move(m), steel(), {});
  Vec q = random_vec(model.n_free(), 0.2, 42);
  Vec f0 = model.internal_force(q);
  for (int c = 0; c < 3; ++c) {
    Vec q_shift = q + 5.0 * model.direction_mask(c);
    CHECK((model.internal_force(q_shift) - f0).norm() <= 1e-9 * std::max(f0.norm(), 1.0));
  }
}

TEST_CASE("objectivity: small rigid rotations produce no elastic force") {
  Mesh m = structured_box(linspace(0, 20, 2), linspace(0, 10, 1), linspace(0, 2, 1));
  FullOrderModel model(m, steel(), {});
  const double theta = 1e-2;
  Mat3 R;
  R = Eigen::AngleAxisd(theta, Vec3(0.3, 0.5, 0.81).normalized()).toRotationMatrix();
  Vec q_rot(model.n_free());
  Vec q_nodal = Vec::Zero(3 * m.n_nodes());
  for (Index n = 0; n < m.n_nodes(); ++n) {
    Vec3 X = m.nodes.row(n).transpose();
    Vec3 u = R * X - X;
    for (int c = 0; c < 3; ++c) q_nodal(3 * n + c) = u(c);
  }
  q_rot = model.restrict_full(q_nodal);
  Vec f = model.internal_force(q_rot);
  // St. Venant-Kirchhoff strain vanishes under rigid rotation; force stays at
  // round-off, far below quadratic growth in the angle.
  CHECK(f.norm() <= 1e-8 * Mat(model.K()).norm() * q_rot.norm());
}

TEST_CASE("tangent matches central finite differences") {
  FullOrderModel model = cantilever_strip(20, 10, 2, 2, 1, 1, steel());
  Vec q = random_vec(model.n_free(), 0.3, 7);
  Vec f;
  SpMat K_T;
  model.internal_force_and_tangent(q, f, K_T);
  auto feval = [&](const Vec& x) { return model.internal_force(x); };
  Mat J = fd_jacobian(feval, q, 1e-5);
  CHECK((J - Mat(K_T)).norm() / Mat(K_T).norm() < 1e-6);
}

TEST_CASE("internal force is exactly cubic along any line") {
  FullOrderModel model = cantilever_strip(20, 10, 2, 2, 1, 1, steel());
  Vec d = random_vec(model.n_free(), 1.0, 3);
  Vec base = random_vec(model.n_free(), 0.1, 4);
  // Fourth divided difference of a cubic vanishes identically.
  const double h = 0.05;
  Vec sum = Vec::Zero(model.n_free());
  const double binom[5] = {1, -4, 6, -4, 1};
  double scale = 0.0;
  for (int k = 0; k <= 4; ++k) {
    Vec fk = model.internal_force(base + (k * h) * d);
    sum += binom[k] * fk;
    scale = std::max(scale, fk.norm());
  }
  CHECK(sum.norm() <= 1e-10 * std::max(scale, 1.0));
}

TEST_CASE("von mises: zero state and uniaxial identity") {
  Mesh m = structured_box(linspace(0, 2, 1), linspace(0, 2, 1), linspace(0, 2, 1));
  FullOrderModel model(m, steel(), {});
  CHECK(model.max_von_mises(Vec::Zero(model.n_free())) == 0.0);

  // Uniaxial stress state via u = (e x, -nu e y, -nu e z) in the linear range.
  const double eps = 1e-6, nu = steel().poisson_ratio;
  Vec q_nodal = Vec::Zero(3 * m.n_nodes());
  for (Index n = 0; n < m.n_nodes(); ++n) {
    q_nodal(3 * n + 0) = eps * m.nodes(n, 0);
    q_nodal(3 * n + 1) = -nu * eps * m.nodes(n, 1);
    q_nodal(3 * n + 2) = -nu * eps * m.nodes(n, 2);
  }
  const double s = steel().youngs_modulus * eps;
  CHECK(model.max_von_mises(model.restrict_full(q_nodal)) == doctest::Approx(s).epsilon(1e-5));
}

TEST_CASE("clamped strip under tip load: peak stress at the clamped end") {
  FullOrderModel model = cantilever_strip(40, 8, 2, 8, 2, 1, steel());
  Vec f = Vec::Zero(model.n_free());
  const Mesh& m = model.mesh();
  for (int n : nodes_on_plane(m, 0, 40.0)) {
    Index d = model.free_index(n, 2);
    REQUIRE(d >= 0);
    f(d) = 0.5; // small transverse load, linear regime
  }
  Vec q = Vec(Mat(model.K()).ldlt().solve(f));
  int elem = -1;
  model.max_von_mises(q, &elem);
  REQUIRE(elem >= 0);
  double cx = 0.0;
  for (int a = 0; a < 8; ++a) cx += m.nodes(m.elements[static_cast<std::size_t>(elem)][static_cast<std::size_t>(a)], 0) / 8.0;
  CHECK(cx < 40.0 / 8.0); // first element row
}

TEST_CASE("4x2x1 cantilever strip close to Euler-Bernoulli") {
  // Geometry chosen so that the trilinear element's parasitic stiffness and
  // the beam theory's rigid-shear idealization land within a few percent of
  // each other (both overestimate the true 3D stiffness).
  const double L = 22.0, W = 16.0, t = 10.0;
  FullOrderModel model = cantilever_strip(L, W, t, 4, 2, 1, steel());
  EigPairs ep = eig_lowest(model.K(), model.M(), 1);
  const double omega_fe = std::sqrt(ep.lambda(0));
  const double E = steel().youngs_modulus, rho = steel().rho_mass();
  const double I = W * t * t * t / 12.0, A = W * t;
  const double beta = 1.8751040687119611;
  const double omega_eb = beta * beta * std::sqrt(E * I / (rho * A)) / (L * L);
  CHECK(std::abs(omega_fe - omega_eb) / omega_eb < 0.05);
}
