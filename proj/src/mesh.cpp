#include "panelrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "panelrom/error.hpp"
#include "panelrom/hex8.hpp"
#include "panelrom/util.hpp"

namespace panelrom {

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  require(it != node_sets.end(), ErrCode::invalid, "unknown node set: " + name);
  return it->second;
}

void Mesh::validate() const {
  const Index nn = n_nodes();
  for (Index e = 0; e < n_elements(); ++e) {
    const auto& conn = elements[static_cast<std::size_t>(e)];
    std::set<int> uniq(conn.begin(), conn.end());
    require(uniq.size() == 8, ErrCode::invalid, "element " + std::to_string(e) + " has repeated nodes");
    for (int n : conn)
      require(n >= 0 && n < nn, ErrCode::invalid, "element " + std::to_string(e) + " references missing node");
    Eigen::Matrix<double, 8, 3> X;
    for (int a = 0; a < 8; ++a) X.row(a) = nodes.row(conn[static_cast<std::size_t>(a)]);
    require(hex8::min_jacobian(X) > 0.0, ErrCode::invalid,
            "element " + std::to_string(e) + " has non-positive Jacobian");
  }
  for (const auto& [name, ids] : node_sets)
    for (int n : ids)
      require(n >= 0 && n < nn, ErrCode::invalid, "node set " + name + " references missing node");
}

void Mesh::write(const std::string& path) const {
  std::ofstream os(path);
  require(os.good(), ErrCode::io, "cannot write " + path);
  os << "# panelrom mesh 1\n";
  os << "nodes " << n_nodes() << "\n";
  for (Index i = 0; i < n_nodes(); ++i)
    os << i << " " << format_full(nodes(i, 0)) << " " << format_full(nodes(i, 1)) << " "
       << format_full(nodes(i, 2)) << "\n";
  os << "elements " << n_elements() << "\n";
  for (Index e = 0; e < n_elements(); ++e) {
    os << e;
    for (int n : elements[static_cast<std::size_t>(e)]) os << " " << n;
    os << "\n";
  }
  for (const auto& [name, ids] : node_sets) {
    os << "nodeset " << name << " " << ids.size() << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i) os << ids[i] << ((i + 1) % 16 == 0 ? "\n" : " ");
    if (!ids.empty() && ids.size() % 16 != 0) os << "\n";
    if (ids.empty()) os << "\n";
  }
}

Mesh Mesh::read(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), ErrCode::io, "cannot read " + path);
  Mesh m;
  std::string tok;
  while (is >> tok) {
    if (tok == "#") {
      std::string rest;
      std::getline(is, rest);
    } else if (tok == "nodes") {
      Index n;
      is >> n;
      m.nodes.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        Index id;
        double x, y, z;
        is >> id >> x >> y >> z;
        require(static_cast<bool>(is) && id == i, ErrCode::io, "bad node line in " + path);
        m.nodes.row(i) << x, y, z;
      }
    } else if (tok == "elements") {
      Index n;
      is >> n;
      m.elements.resize(static_cast<std::size_t>(n));
      for (Index e = 0; e < n; ++e) {
        Index id;
        is >> id;
        require(static_cast<bool>(is) && id == e, ErrCode::io, "bad element line in " + path);
        for (int a = 0; a < 8; ++a) is >> m.elements[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)];
      }
    } else if (tok == "nodeset") {
      std::string name;
      std::size_t n;
      is >> name >> n;
      auto& ids = m.node_sets[name];
      ids.resize(n);
      for (std::size_t i = 0; i < n; ++i) is >> ids[i];
    } else {
      fail(ErrCode::io, "unknown token '" + tok + "' in " + path);
    }
  }
  return m;
}

Mesh structured_box(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<double>& zs) {
  require(xs.size() >= 2 && ys.size() >= 2 && zs.size() >= 2, ErrCode::invalid,
          "structured_box needs at least one element per direction");
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size()), nz = static_cast<int>(zs.size());
  Mesh m;
  m.nodes.resize(static_cast<Index>(nx) * ny * nz, 3);
  auto nid = [&](int i, int j, int k) { return (i * ny + j) * nz + k; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) m.nodes.row(nid(i, j, k)) << xs[static_cast<std::size_t>(i)],
          ys[static_cast<std::size_t>(j)], zs[static_cast<std::size_t>(k)];
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      for (int k = 0; k + 1 < nz; ++k) {
        std::array<int, 8> c = {nid(i, j, k),         nid(i + 1, j, k),     nid(i + 1, j + 1, k),
                                nid(i, j + 1, k),     nid(i, j, k + 1),     nid(i + 1, j, k + 1),
                                nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)};
        m.elements.push_back(c);
      }
  return m;
}

std::vector<double> graded_axis(double a, double b, int n, double grading) {
  require(n >= 1, ErrCode::invalid, "graded_axis needs n >= 1");
  require(grading > 0.0, ErrCode::invalid, "grading ratio must be positive");
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  if (n == 1 || std::abs(grading - 1.0) < 1e-12) {
    for (int i = 0; i <= n; ++i) xs[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
    return xs;
  }
  // Element sizes h_i = h0 * r^i with r chosen so h_{n-1}/h_0 = 1/grading.
  double r = std::pow(1.0 / grading, 1.0 / (n - 1));
  double sum = (std::pow(r, n) - 1.0) / (r - 1.0);
  double h0 = (b - a) / sum;
  xs[0] = a;
  double h = h0;
  for (int i = 1; i <= n; ++i) {
    xs[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i) - 1] + h;
    h *= r;
  }
  xs[static_cast<std::size_t>(n)] = b;
  return xs;
}

std::vector<int> nodes_on_plane(const Mesh& mesh, int axis, double value, double tol) {
  std::vector<int> out;
  for (Index i = 0; i < mesh.n_nodes(); ++i)
    if (std::abs(mesh.nodes(i, axis) - value) <= tol) out.push_back(static_cast<int>(i));
  return out;
}

int append_mesh(Mesh& base, const Mesh& other) {
  const int off = static_cast<int>(base.n_nodes());
  Eigen::Matrix<double, Eigen::Dynamic, 3> merged(base.n_nodes() + other.n_nodes(), 3);
  merged.topRows(base.n_nodes()) = base.nodes;
  merged.bottomRows(other.n_nodes()) = other.nodes;
  base.nodes = std::move(merged);
  for (const auto& e : other.elements) {
    std::array<int, 8> c = e;
    for (int& n : c) n += off;
    base.elements.push_back(c);
  }
  for (const auto& [name, ids] : other.node_sets) {
    auto& dst = base.node_sets[name];
    for (int n : ids) dst.push_back(n + off);
  }
  return off;
}

} // namespace panelrom
