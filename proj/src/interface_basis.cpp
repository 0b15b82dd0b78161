#include "panelrom/interface_basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "panelrom/error.hpp"
#include "panelrom/util.hpp"

namespace panelrom {

void InterfacePatch::validate() const {
  require(n_nodes() > 0, ErrCode::invalid, "interface patch is empty");
  require(coords.rows() == n_nodes() && weights.size() == n_nodes(), ErrCode::invalid,
          "interface patch size mismatch");
  require(weights.minCoeff() > 0.0, ErrCode::invalid, "interface weights must be positive");
  Vec2 wc = (coords.transpose() * weights) / weights.sum();
  require(wc.norm() <= 1e-8 * (coords.cwiseAbs().maxCoeff() + 1.0), ErrCode::invalid,
          "interface coordinates are not centered");
}

InterfacePatch build_interface_patch(const Mesh& mesh, const std::string& node_set, int normal_dir) {
  require(normal_dir >= 0 && normal_dir < 3, ErrCode::invalid, "invalid normal direction");
  const auto& ids = mesh.node_set(node_set);
  require(!ids.empty(), ErrCode::invalid, "substructure interface set '" + node_set + "' is empty");

  InterfacePatch p;
  p.node_ids = ids;
  p.dir_normal = normal_dir;
  p.dir_axis1 = (normal_dir + 1) % 3;
  p.dir_axis2 = (normal_dir + 2) % 3;
  if (p.dir_axis1 > p.dir_axis2) std::swap(p.dir_axis1, p.dir_axis2);

  std::set<int> in_set(ids.begin(), ids.end());
  std::map<int, Index> local;
  for (Index i = 0; i < p.n_nodes(); ++i) local[ids[static_cast<std::size_t>(i)]] = i;

  // Element faces with all four nodes in the set tile the cross section;
  // both neighbor elements contribute the same face, dedupe by node ids.
  static const int kFaces[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                   {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  p.weights = Vec::Zero(p.n_nodes());
  std::set<std::array<int, 4>> seen;
  for (const auto& conn : mesh.elements) {
    for (const auto& fc : kFaces) {
      std::array<int, 4> face = {conn[static_cast<std::size_t>(fc[0])], conn[static_cast<std::size_t>(fc[1])],
                                 conn[static_cast<std::size_t>(fc[2])], conn[static_cast<std::size_t>(fc[3])]};
      if (!std::all_of(face.begin(), face.end(), [&](int n) { return in_set.count(n) > 0; })) continue;
      std::array<int, 4> key = face;
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
      // Planar quad area via the cross product of the diagonals.
      Vec3 d1 = mesh.nodes.row(face[2]).transpose() - mesh.nodes.row(face[0]).transpose();
      Vec3 d2 = mesh.nodes.row(face[3]).transpose() - mesh.nodes.row(face[1]).transpose();
      const double area = 0.5 * d1.cross(d2).norm();
      for (int n : face) p.weights(local.at(n)) += 0.25 * area;
    }
  }
  require(p.weights.minCoeff() > 0.0, ErrCode::invalid,
          "interface set contains nodes without adjacent interface faces");

  Mat raw(p.n_nodes(), 2);
  for (Index i = 0; i < p.n_nodes(); ++i) {
    raw(i, 0) = mesh.nodes(ids[static_cast<std::size_t>(i)], p.dir_axis1);
    raw(i, 1) = mesh.nodes(ids[static_cast<std::size_t>(i)], p.dir_axis2);
    p.centroid += p.weights(i) * mesh.nodes.row(ids[static_cast<std::size_t>(i)]).transpose();
  }
  p.centroid /= p.weights.sum();
  Vec2 c = (raw.transpose() * p.weights) / p.weights.sum();
  p.coords = raw.rowwise() - c.transpose();
  p.validate();
  return p;
}

namespace {

std::vector<PolyTerm> triangular_terms(int degree) {
  std::vector<PolyTerm> terms;
  for (int d = 0; d <= degree; ++d)
    for (int a = 0; a <= d; ++a) terms.push_back({a, d - a});
  return terms;
}

bool keep_column(const InterfacePatch& patch, const PolyTerm& t, int dir, SymmetryFilter filter) {
  if (filter == SymmetryFilter::none) return true;
  // Response symmetric about axis1 = 0: in-plane-1 displacements must be odd
  // in axis1, the other two components even.
  const bool odd = (t.a % 2) == 1;
  return dir == patch.dir_axis1 ? odd : !odd;
}

} // namespace

InterfaceBasis build_interface_basis_terms(const InterfacePatch& patch,
                                           const std::vector<PolyTerm>& term_list,
                                           SymmetryFilter filter) {
  patch.validate();
  const Index n = patch.n_nodes();
  const Index nt = static_cast<Index>(term_list.size());
  require(nt >= 1, ErrCode::invalid, "empty polynomial term list");

  InterfaceBasis basis;
  basis.terms = term_list;
  for (const auto& t : term_list) basis.degree = std::max(basis.degree, t.a + t.b);

  // Raw monomial values, then modified Gram-Schmidt in the weighted inner
  // product with one re-orthogonalization pass.
  Mat v(n, nt);
  for (Index k = 0; k < nt; ++k)
    for (Index i = 0; i < n; ++i)
      v(i, k) = std::pow(patch.coords(i, 0), term_list[static_cast<std::size_t>(k)].a) *
                std::pow(patch.coords(i, 1), term_list[static_cast<std::size_t>(k)].b);
  auto wdot = [&](const Vec& x, const Vec& y) { return x.dot(patch.weights.asDiagonal() * y); };
  for (Index k = 0; k < nt; ++k) {
    const double raw_norm2 = wdot(v.col(k), v.col(k));
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < k; ++j) {
        const double c = wdot(v.col(j), v.col(k)) / wdot(v.col(j), v.col(j));
        v.col(k) -= c * v.col(j);
      }
    const double norm2 = wdot(v.col(k), v.col(k));
    if (norm2 <= 1e-20 * std::max(raw_norm2, 1e-300)) {
      const auto& t = term_list[static_cast<std::size_t>(k)];
      fail(ErrCode::invalid, "interface polynomial term x^" + std::to_string(t.a) + " y^" +
                                 std::to_string(t.b) + " is numerically dependent on the node set");
    }
  }
  // Max-abs normalization per scalar function.
  for (Index k = 0; k < nt; ++k) v.col(k) /= v.col(k).cwiseAbs().maxCoeff();
  basis.values = v;

  // Nodal rigid-body fields restricted to the interface, for tagging.
  Mat rigid(3 * n, 6);
  rigid.setZero();
  for (Index i = 0; i < n; ++i) {
    Vec3 r = Vec3::Zero();
    r(patch.dir_axis1) = patch.coords(i, 0);
    r(patch.dir_axis2) = patch.coords(i, 1);
    for (int c = 0; c < 3; ++c) rigid(3 * i + c, c) = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
      Vec3 u = Vec3::Unit(ax).cross(r);
      for (int c = 0; c < 3; ++c) rigid(3 * i + c, 3 + ax) = u(c);
    }
  }
  Eigen::HouseholderQR<Mat> qr(rigid);
  Mat Q = qr.householderQ() * Mat::Identity(3 * n, 6);

  // Expand to three translational DOFs per node and filter.
  std::vector<InterfaceColumn> cols;
  for (Index k = 0; k < nt; ++k)
    for (int dir = 0; dir < 3; ++dir)
      if (keep_column(patch, term_list[static_cast<std::size_t>(k)], dir, filter))
        cols.push_back({static_cast<int>(k), dir, false});
  basis.gamma = Mat::Zero(3 * n, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (Index i = 0; i < n; ++i) basis.gamma(3 * i + cols[c].dir, static_cast<Index>(c)) = v(i, cols[c].term);
    const Vec col = basis.gamma.col(static_cast<Index>(c));
    const Vec res = col - Q * (Q.transpose() * col);
    cols[c].rigid_body = res.norm() <= 1e-8 * col.norm();
  }
  basis.columns = std::move(cols);
  return basis;
}

InterfaceBasis build_interface_basis(const InterfacePatch& patch, int degree, SymmetryFilter filter) {
  require(degree >= 0, ErrCode::invalid, "polynomial degree must be non-negative");
  const auto terms = triangular_terms(degree);
  // Distinct in-plane locations bound the representable polynomial count.
  std::set<std::pair<double, double>> locs;
  for (Index i = 0; i < patch.n_nodes(); ++i)
    locs.insert({patch.coords(i, 0), patch.coords(i, 1)});
  require(locs.size() >= terms.size(), ErrCode::invalid,
          "interface has fewer distinct node locations than polynomial terms");
  return build_interface_basis_terms(patch, terms, filter);
}

std::string InterfaceBasis::column_label(Index c) const {
  const auto& col = columns[static_cast<std::size_t>(c)];
  const auto& t = terms[static_cast<std::size_t>(col.term)];
  const char dir_name[3] = {'x', 'y', 'z'};
  return "a" + std::to_string(t.a) + "b" + std::to_string(t.b) + dir_name[col.dir];
}

void write_interface_basis(const std::string& path, const InterfaceBasis& basis,
                           const InterfacePatch& patch) {
  std::ofstream os(path);
  require(os.good(), ErrCode::io, "cannot write " + path);
  os << "# interface basis: rows are node DOFs (node id, component), columns are (a, b, direction)\n";
  os << "# nodes:";
  for (int id : patch.node_ids) os << " " << id;
  os << "\ncolumns";
  for (Index c = 0; c < basis.n_columns(); ++c) os << " " << basis.column_label(c);
  os << "\n";
  for (Index r = 0; r < basis.gamma.rows(); ++r) {
    for (Index c = 0; c < basis.n_columns(); ++c)
      os << format_full(basis.gamma(r, c)) << (c + 1 == basis.n_columns() ? "" : " ");
    os << "\n";
  }
}

} // namespace panelrom
