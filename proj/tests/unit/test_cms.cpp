#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "panelrom/cms.hpp"
#include "panelrom/eigs.hpp"

using namespace panelrom;
using namespace testutil;

namespace {

Material steel() { return Material{207000.0, 0.288, 7.829e-6}; }

// Two boxes stacked in z with coincident contact-plane nodes (not merged).
struct Stacked {
  std::shared_ptr<FullOrderModel> model;
  ContactGeometry geom;
};

Stacked stacked_boxes() {
  // Lower block covers x in [0, 10] only, so the x = 20 interface section of
  // the upper box stays clear of the contact patch.
  Mesh lower = structured_box(linspace(0, 10, 2), linspace(0, 10, 1), linspace(-5, 0, 1));
  lower.node_sets["contact_lower"] = nodes_on_plane(lower, 2, 0.0);
  lower.node_sets["bottom"] = nodes_on_plane(lower, 2, -5.0);
  Mesh upper = structured_box(linspace(0, 20, 4), linspace(0, 10, 1), linspace(0, 4, 1));
  std::vector<int> cu;
  for (int n : nodes_on_plane(upper, 2, 0.0))
    if (upper.nodes(n, 0) <= 10.0 + 1e-9) cu.push_back(n);
  upper.node_sets["contact_upper"] = cu;
  upper.node_sets["iface"] = nodes_on_plane(upper, 0, 20.0); // upper box only
  Mesh merged = lower;
  append_mesh(merged, upper);
  auto fixed = fix_dofs(merged.node_set("bottom"), {0, 1, 2});
  Stacked s;
  s.model = std::make_shared<FullOrderModel>(merged, steel(), fixed);
  s.geom = build_contact_geometry(s.model->mesh(), "contact_upper", "contact_lower", 2);
  return s;
}

} // namespace

TEST_CASE("gap transform: relative/mean coordinates round trip") {
  Stacked s = stacked_boxes();
  TransformedModel tm = make_transformed(s.model, s.geom);
  REQUIRE(tm.gap_dofs.size() == 3 * s.geom.pairs.size());

  // Zero displacement: zero gap.
  Vec zero = Vec::Zero(tm.dim());
  CHECK(tm.restrict_coord(zero).norm() == 0.0);

  // Equal displacement of both sides: zero gap, nonzero mean.
  Vec q_nodal = Vec::Zero(tm.dim());
  for (const auto& [up, lo] : s.geom.pairs) {
    q_nodal(s.model->free_index(up, 2)) = 0.7;
    q_nodal(s.model->free_index(lo, 2)) = 0.7;
  }
  Vec q_coord = tm.restrict_coord(q_nodal);
  double gap_norm = 0.0;
  for (Index d : tm.gap_dofs) gap_norm += std::abs(q_coord(d));
  CHECK(gap_norm == 0.0);
  CHECK(q_coord.norm() > 0.0);

  // Random displacements round trip through V.
  Vec q_rand = random_vec(tm.dim(), 1.0, 99);
  CHECK((tm.lift(tm.restrict_coord(q_rand)) - q_rand).norm() <= 1e-12 * q_rand.norm());

  // Congruence keeps the operators symmetric.
  CHECK((Mat(tm.K) - Mat(tm.K).transpose()).norm() <= 1e-10 * Mat(tm.K).norm());
}

TEST_CASE("unpaired contact nodes are rejected") {
  Stacked s = stacked_boxes();
  Mesh broken = s.model->mesh();
  broken.node_sets["contact_upper"].pop_back();
  CHECK_THROWS_AS(build_contact_geometry(broken, "contact_upper", "contact_lower", 2), Error);
}

TEST_CASE("Guyan limit: exact static response to any boundary displacement") {
  Stacked s = stacked_boxes();
  TransformedModel tm = make_transformed(s.model, s.geom);
  InterfacePatch empty_patch;
  InterfaceBasis empty_basis;
  ComponentBasis cb =
      compute_component_basis(tm, empty_patch, empty_basis, 0, 0, RegionKind::support);
  REQUIRE(cb.dim_reduced() == static_cast<Index>(tm.gap_dofs.size()));

  // Prescribed gap displacements: the reconstructed field must be in static
  // equilibrium on every non-boundary row, and match an independent dense
  // solve of the displacement-driven problem.
  Vec q_b = random_vec(cb.dim_reduced(), 0.01, 21);
  Vec q = cb.T * q_b;
  Vec r = tm.K * q;
  std::vector<char> is_b(static_cast<std::size_t>(tm.dim()), 0);
  for (Index d : tm.gap_dofs) is_b[static_cast<std::size_t>(d)] = 1;
  double r_int = 0.0;
  for (Index i = 0; i < tm.dim(); ++i)
    if (!is_b[static_cast<std::size_t>(i)]) r_int = std::max(r_int, std::abs(r(i)));
  CHECK(r_int <= 1e-8 * Mat(tm.K).cwiseAbs().maxCoeff() * q_b.cwiseAbs().maxCoeff());

  Mat Kd = Mat(tm.K);
  std::vector<Index> inner;
  for (Index i = 0; i < tm.dim(); ++i)
    if (!is_b[static_cast<std::size_t>(i)]) inner.push_back(i);
  Mat K_ii(inner.size(), inner.size());
  Mat K_ib(inner.size(), tm.gap_dofs.size());
  for (std::size_t a = 0; a < inner.size(); ++a) {
    for (std::size_t b = 0; b < inner.size(); ++b) K_ii(a, b) = Kd(inner[a], inner[b]);
    for (std::size_t b = 0; b < tm.gap_dofs.size(); ++b) K_ib(a, b) = Kd(inner[a], tm.gap_dofs[b]);
  }
  Vec q_i_ref = Mat(K_ii).ldlt().solve((-K_ib * q_b).eval());
  Vec q_i(inner.size());
  for (std::size_t a = 0; a < inner.size(); ++a) q_i(static_cast<Index>(a)) = q(inner[a]);
  CHECK((q_i - q_i_ref).norm() <= 1e-9 * std::max(q_i_ref.norm(), 1e-12));
}

TEST_CASE("untruncated basis is an exact change of basis") {
  // Bar of two elements, interface at the far cross-section.
  Mesh bar = structured_box(linspace(0, 2, 2), linspace(0, 1, 1), linspace(0, 1, 1));
  bar.node_sets["iface"] = nodes_on_plane(bar, 0, 2.0);
  auto model = std::make_shared<FullOrderModel>(bar, steel(), std::vector<int>{});
  TransformedModel tm = make_transformed(model);
  InterfacePatch patch = build_interface_patch(model->mesh(), "iface", 0);
  std::vector<PolyTerm> tensor = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  InterfaceBasis basis = build_interface_basis_terms(patch, tensor, SymmetryFilter::none);
  REQUIRE(basis.n_columns() == 12);
  const Index ni = tm.dim() - 12;
  ComponentBasis cb = compute_component_basis(tm, patch, basis, 12, ni, RegionKind::thin_walled);
  ReducedComponent rc = reduce_component(tm, cb);

  EigPairs full = eig_lowest(tm.K, tm.M, tm.dim());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> red(rc.Kred, rc.Mred);
  const double lam_max = full.lambda(tm.dim() - 1);
  for (Index j = 0; j < tm.dim(); ++j) {
    if (std::abs(full.lambda(j)) <= 1e-9 * lam_max) {
      // Rigid-body class: both are numerical zeros.
      CHECK(std::abs(red.eigenvalues()(j)) <= 1e-9 * lam_max);
    } else {
      CHECK(std::abs(red.eigenvalues()(j) - full.lambda(j)) <= 1e-10 * std::abs(full.lambda(j)));
    }
  }
}

TEST_CASE("block sparsity of the reduction matrix is structural") {
  Stacked s = stacked_boxes();
  TransformedModel tm = make_transformed(s.model, s.geom);
  InterfacePatch patch = build_interface_patch(s.model->mesh(), "iface", 0);
  InterfaceBasis basis = build_interface_basis(patch, 1, SymmetryFilter::none);
  ComponentBasis cb = compute_component_basis(tm, patch, basis, 3, 2, RegionKind::support);

  // Zero blocks of the reduction matrix are exactly zero.
  for (Index j = 0; j < cb.n_b; ++j)
    for (std::size_t r = 0; r < cb.partition.gamma.size(); ++r)
      CHECK(cb.T(cb.partition.gamma[r], j) == 0.0);
  for (std::size_t rb = 0; rb < cb.partition.b.size(); ++rb) {
    for (Index c = 0; c < cb.dim_reduced(); ++c) {
      const double expect = (static_cast<Index>(rb) == c) ? 1.0 : 0.0;
      CHECK(cb.T(cb.partition.b[rb], c) == expect);
    }
  }

  // Contact forces live only on b rows after projection.
  Vec f = Vec::Zero(tm.dim());
  for (std::size_t j = 0; j < tm.gap_dofs.size(); ++j) f(tm.gap_dofs[j]) = 1.0 + static_cast<double>(j);
  Vec f_red = cb.T.transpose() * f;
  for (Index j = 0; j < cb.n_b; ++j) CHECK(f_red(j) == f(tm.gap_dofs[static_cast<std::size_t>(j)]));
  for (Index j = cb.n_b; j < cb.dim_reduced(); ++j) CHECK(f_red(j) == 0.0);
}

TEST_CASE("modal reduction gives identity mass and diagonal stiffness") {
  FullOrderModel base = cantilever_strip(40, 8, 2, 8, 2, 1, steel());
  auto model = std::make_shared<FullOrderModel>(base);
  TransformedModel tm = make_transformed(model);
  EigPairs ep = eig_lowest(tm.K, tm.M, 4);
  ComponentBasis cb;
  cb.kind = RegionKind::thin_walled;
  cb.n_modes = 4;
  cb.T = ep.phi;
  cb.strain_free.assign(4, false);
  ReducedComponent rc = reduce_component(tm, cb);
  CHECK((rc.Mred - Mat::Identity(4, 4)).norm() <= 1e-8);
  for (Index i = 0; i < 4; ++i)
    CHECK(rc.Kred(i, i) == doctest::Approx(ep.lambda(i)).epsilon(1e-8));
}

TEST_CASE("reduced eigenvalues restricted to fixed b and gamma match theta") {
  Stacked s = stacked_boxes();
  TransformedModel tm = make_transformed(s.model, s.geom);
  InterfacePatch patch = build_interface_patch(s.model->mesh(), "iface", 0);
  InterfaceBasis basis = build_interface_basis(patch, 1, SymmetryFilter::none);
  ComponentBasis cb = compute_component_basis(tm, patch, basis, 3, 3, RegionKind::support);
  ReducedComponent rc = reduce_component(tm, cb);

  const Index off = cb.n_b + cb.n_gamma;
  Mat Kqq = rc.Kred.block(off, off, 3, 3);
  Mat Mqq = rc.Mred.block(off, off, 3, 3);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Kqq, Mqq);
  for (Index j = 0; j < 3; ++j)
    CHECK(es.eigenvalues()(j) == doctest::Approx(cb.theta_lambda(j)).epsilon(1e-8));
}
