#include "panelrom/cms.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "panelrom/eigs.hpp"
#include "panelrom/error.hpp"

namespace panelrom {

namespace {

SpMat select_block(const SpMat& A, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  std::vector<Index> rmap(static_cast<std::size_t>(A.rows()), -1), cmap(static_cast<std::size_t>(A.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[static_cast<std::size_t>(rows[i])] = static_cast<Index>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cmap[static_cast<std::size_t>(cols[j])] = static_cast<Index>(j);
  std::vector<Triplet> t;
  for (Index k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      const Index r = rmap[static_cast<std::size_t>(it.row())], c = cmap[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SpMat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

} // namespace

void TransformedModel::force_and_tangent(const Vec& q, Vec& f, SpMat* K_T,
                                         bool geometric_nonlinear) const {
  if (!geometric_nonlinear) {
    f = K * q;
    if (K_T) *K_T = K;
    return;
  }
  if (!has_transform) {
    if (K_T) {
      model->internal_force_and_tangent(q, f, *K_T);
    } else {
      f = model->internal_force(q);
    }
    return;
  }
  const Vec q_nodal = V * q;
  if (K_T) {
    Vec f_nodal;
    SpMat Kt_nodal;
    model->internal_force_and_tangent(q_nodal, f_nodal, Kt_nodal);
    f = V.transpose() * f_nodal;
    *K_T = V.transpose() * Kt_nodal * V;
  } else {
    f = V.transpose() * model->internal_force(q_nodal);
  }
}

Vec TransformedModel::project_load(const Vec& f_free) const {
  return has_transform ? Vec(V.transpose() * f_free) : f_free;
}

Vec TransformedModel::lift(const Vec& q_coord) const {
  return has_transform ? Vec(V * q_coord) : q_coord;
}

Vec TransformedModel::restrict_coord(const Vec& q_free) const {
  if (!has_transform) return q_free;
  // V is its own sparse inverse on the unpaired block; solve the paired 2x2s.
  Vec out = q_free;
  for (std::size_t p = 0; p < contact.pairs.size(); ++p) {
    const auto [up, lo] = contact.pairs[p];
    for (int c = 0; c < 3; ++c) {
      const Index iu = model->free_index(up, c), il = model->free_index(lo, c);
      out(iu) = q_free(iu) - q_free(il);             // gap
      out(il) = 0.5 * (q_free(iu) + q_free(il));     // mean
    }
  }
  return out;
}

TransformedModel make_transformed(std::shared_ptr<const FullOrderModel> model,
                                  ContactGeometry contact) {
  TransformedModel tm;
  tm.model = std::move(model);
  tm.contact = std::move(contact);
  const Index n = tm.model->n_free();
  if (tm.contact.empty()) {
    tm.V.resize(n, n);
    tm.V.setIdentity();
    tm.has_transform = false;
    tm.M = tm.model->M();
    tm.K = tm.model->K();
    return tm;
  }
  std::vector<Triplet> t;
  std::set<Index> paired;
  for (const auto& [up, lo] : tm.contact.pairs)
    for (int c = 0; c < 3; ++c) {
      const Index iu = tm.model->free_index(up, c), il = tm.model->free_index(lo, c);
      require(iu >= 0 && il >= 0, ErrCode::invalid, "contact pair touches a constrained DOF");
      require(paired.insert(iu).second && paired.insert(il).second, ErrCode::invalid,
              "contact node appears in more than one pair");
      // Coordinates: gap g at the upper slot, mean m at the lower slot;
      // u_up = m + g/2, u_lo = m - g/2.
      t.emplace_back(iu, iu, 0.5);
      t.emplace_back(iu, il, 1.0);
      t.emplace_back(il, iu, -0.5);
      t.emplace_back(il, il, 1.0);
      tm.gap_dofs.push_back(iu);
    }
  for (Index i = 0; i < n; ++i)
    if (!paired.count(i)) t.emplace_back(i, i, 1.0);
  tm.V.resize(n, n);
  tm.V.setFromTriplets(t.begin(), t.end());
  tm.has_transform = true;
  tm.M = (tm.V.transpose() * tm.model->M() * tm.V).pruned();
  tm.K = (tm.V.transpose() * tm.model->K() * tm.V).pruned();
  return tm;
}

ContactGeometry build_contact_geometry(const Mesh& mesh, const std::string& upper_set,
                                       const std::string& lower_set, int normal_dir) {
  const auto& upper = mesh.node_set(upper_set);
  const auto& lower = mesh.node_set(lower_set);
  require(upper.size() == lower.size(), ErrCode::invalid,
          "contact node sets have different sizes (unpaired contact nodes)");
  const int a1 = normal_dir == 0 ? 1 : 0;
  const int a2 = normal_dir == 2 ? 1 : 2;
  auto key = [&](int n) {
    return std::make_pair(std::round(mesh.nodes(n, a1) * 1e6), std::round(mesh.nodes(n, a2) * 1e6));
  };
  std::map<std::pair<double, double>, int> lower_by_pos;
  for (int n : lower) {
    const bool fresh = lower_by_pos.emplace(key(n), n).second;
    require(fresh, ErrCode::invalid, "duplicate lower contact node position");
  }
  ContactGeometry g;
  g.normal_comp = normal_dir;
  g.coords.resize(static_cast<Index>(upper.size()), 2);
  Index i = 0;
  for (int n : upper) {
    auto it = lower_by_pos.find(key(n));
    require(it != lower_by_pos.end(), ErrCode::invalid,
            "unpaired contact node " + std::to_string(n));
    g.pairs.emplace_back(n, it->second);
    g.coords(i, 0) = mesh.nodes(n, a1);
    g.coords(i, 1) = mesh.nodes(n, a2);
    ++i;
  }
  // Tributary areas from the upper-side faces lying in the contact plane.
  std::set<int> in_set(upper.begin(), upper.end());
  std::map<int, Index> local;
  for (std::size_t k = 0; k < upper.size(); ++k) local[upper[k]] = static_cast<Index>(k);
  static const int kFaces[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                   {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  g.weight = Vec::Zero(g.n_pairs());
  std::set<std::array<int, 4>> seen;
  for (const auto& conn : mesh.elements)
    for (const auto& fc : kFaces) {
      std::array<int, 4> face = {conn[static_cast<std::size_t>(fc[0])], conn[static_cast<std::size_t>(fc[1])],
                                 conn[static_cast<std::size_t>(fc[2])], conn[static_cast<std::size_t>(fc[3])]};
      if (!std::all_of(face.begin(), face.end(), [&](int n) { return in_set.count(n) > 0; })) continue;
      std::array<int, 4> sorted = face;
      std::sort(sorted.begin(), sorted.end());
      if (!seen.insert(sorted).second) continue;
      Vec3 d1 = mesh.nodes.row(face[2]).transpose() - mesh.nodes.row(face[0]).transpose();
      Vec3 d2 = mesh.nodes.row(face[3]).transpose() - mesh.nodes.row(face[1]).transpose();
      const double area = 0.5 * d1.cross(d2).norm();
      for (int n : face) g.weight(local.at(n)) += 0.25 * area;
    }
  require(g.weight.minCoeff() > 0.0, ErrCode::invalid, "contact node without tributary area");
  return g;
}

DofPartition make_partition(const TransformedModel& tm, const InterfacePatch& patch) {
  DofPartition p;
  p.b = tm.gap_dofs;
  std::set<Index> taken(p.b.begin(), p.b.end());
  for (int node : patch.node_ids)
    for (int c = 0; c < 3; ++c) {
      const Index d = tm.model->free_index(node, c);
      require(d >= 0, ErrCode::invalid, "substructure-interface node is constrained");
      require(!taken.count(d), ErrCode::invalid, "substructure-interface node overlaps contact");
      p.gamma.push_back(d);
      taken.insert(d);
    }
  for (Index i = 0; i < tm.dim(); ++i)
    if (!taken.count(i)) p.interior.push_back(i);
  return p;
}

ComponentBasis compute_component_basis(const TransformedModel& tm, const InterfacePatch& patch,
                                       const InterfaceBasis& basis, Index m_gamma, Index n_modes,
                                       RegionKind kind, double band_lo_hz, double band_hi_hz) {
  require(m_gamma >= 0 && m_gamma <= basis.n_columns(), ErrCode::invalid,
          "m_gamma exceeds available interface columns");
  ComponentBasis cb;
  cb.kind = kind;
  cb.partition = make_partition(tm, patch);
  if (kind == RegionKind::thin_walled)
    require(cb.partition.b.empty(), ErrCode::invalid, "thin-walled region must not carry contact DOFs");

  const auto& part = cb.partition;
  const Index nb = static_cast<Index>(part.b.size());
  const Index ni = static_cast<Index>(part.interior.size());
  cb.n_b = nb;
  cb.n_gamma = m_gamma;

  const SpMat K_ii = select_block(tm.K, part.interior, part.interior);
  const SpMat M_ii = select_block(tm.M, part.interior, part.interior);
  Eigen::SimplicialLDLT<SpMat> fact(K_ii);
  require(fact.info() == Eigen::Success, ErrCode::solver,
          "singular internal stiffness partition (region not constrained against rigid motion)");

  // Constraint modes for the contact boundary.
  Mat psi_b(ni, nb);
  if (nb > 0) {
    const Mat K_ib = Mat(select_block(tm.K, part.interior, part.b));
    psi_b = fact.solve((-K_ib).eval());
  }

  // Constraint modes for the reduced interface: only the product with Gamma.
  const Mat gamma_sel = basis.gamma.leftCols(m_gamma);
  Mat psi_g(ni, m_gamma);
  if (m_gamma > 0) {
    const Mat K_ig = Mat(select_block(tm.K, part.interior, part.gamma));
    psi_g = fact.solve((-(K_ig * gamma_sel)).eval());
  }

  // Fixed-interface normal modes, optionally filtered to a frequency band.
  Mat theta(ni, 0);
  if (n_modes > 0) {
    const bool band = band_hi_hz > 0.0;
    Index request = band ? std::min<Index>(ni, 3 * n_modes + 10) : n_modes;
    require(n_modes <= ni, ErrCode::invalid, "requested more normal modes than internal DOFs");
    EigPairs ep = eig_lowest(K_ii, M_ii, request);
    std::vector<Index> pick;
    for (Index j = 0; j < ep.lambda.size() && static_cast<Index>(pick.size()) < n_modes; ++j) {
      const double f_hz = std::sqrt(std::max(ep.lambda(j), 0.0)) / (2.0 * M_PI);
      if (!band || (f_hz >= band_lo_hz && f_hz <= band_hi_hz)) pick.push_back(j);
    }
    require(static_cast<Index>(pick.size()) == n_modes, ErrCode::invalid,
            "target frequency band holds fewer modes than requested");
    theta.resize(ni, n_modes);
    cb.theta_lambda.resize(n_modes);
    for (Index j = 0; j < n_modes; ++j) {
      Vec t = ep.phi.col(pick[static_cast<std::size_t>(j)]);
      // Mass-normalized per kg so the columns stay dimensionless.
      const double m_kg = t.dot(M_ii * t) / kKgToMassUnit;
      theta.col(j) = t / std::sqrt(m_kg);
      cb.theta_lambda(j) = ep.lambda(pick[static_cast<std::size_t>(j)]);
    }
  }
  cb.n_modes = n_modes;

  // Assemble T with the exact block sparsity of the reduction.
  const Index R = cb.dim_reduced();
  cb.T = Mat::Zero(tm.dim(), R);
  for (Index j = 0; j < nb; ++j) cb.T(part.b[static_cast<std::size_t>(j)], j) = 1.0;
  for (std::size_t r = 0; r < part.gamma.size(); ++r)
    for (Index c = 0; c < m_gamma; ++c)
      cb.T(part.gamma[r], nb + c) = gamma_sel(static_cast<Index>(r), c);
  for (Index r = 0; r < ni; ++r) {
    const Index row = part.interior[static_cast<std::size_t>(r)];
    for (Index c = 0; c < nb; ++c) cb.T(row, c) = psi_b(r, c);
    for (Index c = 0; c < m_gamma; ++c) cb.T(row, nb + c) = psi_g(r, c);
    for (Index c = 0; c < n_modes; ++c) cb.T(row, nb + m_gamma + c) = theta(r, c);
  }

  for (Index c = 0; c < m_gamma; ++c) cb.gamma_labels.push_back(basis.column_label(c));

  // Strain-free (component rigid-body) tagging by elastic energy.
  cb.strain_free.assign(static_cast<std::size_t>(R), false);
  Vec energy(R);
  for (Index j = 0; j < R; ++j) energy(j) = cb.T.col(j).dot(tm.K * cb.T.col(j));
  const double e_max = energy.maxCoeff();
  for (Index j = 0; j < R; ++j)
    cb.strain_free[static_cast<std::size_t>(j)] = energy(j) <= 1e-10 * e_max;
  return cb;
}

ReducedComponent reduce_component(const TransformedModel& tm, const ComponentBasis& basis,
                                  const std::vector<ProbeSpec>& probes) {
  require(basis.T.rows() == tm.dim(), ErrCode::invalid, "basis does not match model dimension");
  ReducedComponent rc;
  rc.kind = basis.kind;
  rc.n_b = basis.n_b;
  rc.n_gamma = basis.n_gamma;
  rc.n_modes = basis.n_modes;
  rc.T = basis.T;
  rc.strain_free = basis.strain_free;
  rc.gamma_labels = basis.gamma_labels;
  rc.contact = tm.contact;

  Mat Mred = basis.T.transpose() * tm.M * basis.T;
  Mat Kred = basis.T.transpose() * tm.K * basis.T;
  const double m_asym = (Mred - Mred.transpose()).cwiseAbs().maxCoeff();
  const double k_asym = (Kred - Kred.transpose()).cwiseAbs().maxCoeff();
  require(m_asym <= 1e-10 * std::max(Mred.cwiseAbs().maxCoeff(), 1e-300), ErrCode::solver,
          "reduced mass asymmetry beyond round-off");
  require(k_asym <= 1e-10 * std::max(Kred.cwiseAbs().maxCoeff(), 1e-300), ErrCode::solver,
          "reduced stiffness asymmetry beyond round-off");
  rc.Mred = 0.5 * (Mred + Mred.transpose());
  rc.Kred = 0.5 * (Kred + Kred.transpose());

  rc.base_load.resize(basis.dim_reduced(), 3);
  for (int c = 0; c < 3; ++c) {
    const Vec mask = tm.model->direction_mask(c);
    rc.base_load.col(c) = basis.T.transpose() * tm.project_load(tm.model->M() * mask);
  }

  rc.probe_rows.resize(static_cast<Index>(probes.size()), basis.dim_reduced());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Index d = tm.model->free_index(probes[p].node, probes[p].comp);
    require(d >= 0, ErrCode::invalid, "probe DOF is constrained");
    // Valid for unpaired probe nodes, where V row is the unit vector.
    rc.probe_rows.row(static_cast<Index>(p)) = basis.T.row(d);
    rc.probe_labels.push_back(probes[p].label);
  }
  return rc;
}

} // namespace panelrom
