#include "panelrom/contact.hpp"

#include <cmath>

#include "panelrom/error.hpp"

namespace panelrom {

void ContactPatch::validate() const {
  require(prm.k_n > 0.0, ErrCode::invalid, "contact normal stiffness must be positive");
  require(prm.mu >= 0.0, ErrCode::invalid, "friction coefficient must be non-negative");
  require(prm.g_sl > 0.0, ErrCode::invalid, "limit stick distance must be positive");
  require(p_n0.size() == geom.n_pairs() && k_t.size() == geom.n_pairs(), ErrCode::invalid,
          "contact patch size mismatch");
  require(p_n0.minCoeff() >= 0.0, ErrCode::invalid, "initial pressure must be non-negative");
  require(geom.weight.minCoeff() > 0.0, ErrCode::invalid, "contact weights must be positive");
}

ContactPatch make_contact_patch(ContactGeometry geom, ContactParams prm, const Vec& chi,
                                double p_bar_n0) {
  require(chi.size() == geom.n_pairs(), ErrCode::invalid, "chi vector size mismatch");
  require(p_bar_n0 >= 0.0, ErrCode::invalid, "mean initial pressure must be non-negative");
  ContactPatch p;
  p.geom = std::move(geom);
  p.prm = prm;
  p.p_n0 = p_bar_n0 * chi;
  p.k_t = prm.mu * p.p_n0 / prm.g_sl;
  p.validate();
  return p;
}

ContactState make_contact_state(const ContactPatch& patch) {
  ContactState s;
  s.nodes.resize(static_cast<std::size_t>(patch.n_nodes()));
  return s;
}

double ContactState::total_dissipated() const {
  double d = 0.0;
  for (const auto& n : nodes) d += n.dissipated;
  return d;
}

Vec normal_pressure(const ContactPatch& patch, const Vec& g_n) {
  require(g_n.size() == patch.n_nodes(), ErrCode::invalid, "gap vector size mismatch");
  return (patch.p_n0 + patch.prm.k_n * g_n).cwiseMax(0.0);
}

namespace {

struct TangIdx {
  int t1, t2, n;
};

TangIdx tang_indices(const ContactPatch& patch) {
  const int n = patch.geom.normal_comp;
  const int t1 = n == 0 ? 1 : 0;
  const int t2 = n == 2 ? 1 : 2;
  return {t1, t2, n};
}

struct NodeEval {
  Vec2 p_t;
  double p_n;
  ContactRegime regime;
  Vec2 dir; // slip direction when slipping
  bool dir_from_increment = false;
};

NodeEval eval_node(const ContactPatch& patch, Index i, const ContactNodeState& st, const Vec3& d) {
  const TangIdx ti = tang_indices(patch);
  NodeEval out;
  const double pen = -d(ti.n);
  out.p_n = std::max(patch.p_n0(i) + patch.prm.k_n * pen, 0.0);
  const Vec2 dg_t(d(ti.t1) - st.g_prev(ti.t1), d(ti.t2) - st.g_prev(ti.t2));
  const double kt = patch.k_t(i);
  if (out.p_n <= 0.0) {
    out.p_t.setZero();
    out.regime = ContactRegime::separated;
    return out;
  }
  if (kt <= 0.0) {
    out.p_t.setZero();
    out.regime = ContactRegime::stick;
    return out;
  }
  const Vec2 trial = st.p_t + kt * dg_t;
  const double cone = patch.prm.mu * out.p_n;
  if (trial.norm() <= cone) {
    out.p_t = trial;
    out.regime = ContactRegime::stick;
    return out;
  }
  // Slip: return to the cone along the increment direction (hold the
  // previous direction for vanishing increments, where it is undefined).
  out.regime = ContactRegime::slip;
  const double len = dg_t.norm();
  if (len > 1e-300) {
    out.dir = dg_t / len;
    out.dir_from_increment = true;
  } else if (st.last_dir.norm() > 0.0) {
    out.dir = st.last_dir;
  } else {
    out.dir = trial / trial.norm();
  }
  out.p_t = cone * out.dir;
  return out;
}

Vec3 gap_triple(const Vec& gaps, Index i) { return gaps.segment<3>(3 * i); }

} // namespace

ContactEval eval_contact(const ContactPatch& patch, const ContactState& committed, const Vec& gaps,
                         bool want_tangent) {
  require(gaps.size() == 3 * patch.n_nodes(), ErrCode::invalid, "gap vector dimension mismatch");
  const TangIdx ti = tang_indices(patch);
  ContactEval ev;
  ev.f_dyn = Vec::Zero(gaps.size());
  ev.p_n.resize(patch.n_nodes());
  ev.p_t.resize(patch.n_nodes(), 2);
  ev.regime.resize(static_cast<std::size_t>(patch.n_nodes()));
  if (want_tangent) ev.tangent.assign(static_cast<std::size_t>(patch.n_nodes()), Mat3::Zero());
  for (Index i = 0; i < patch.n_nodes(); ++i) {
    const Vec3 d = gap_triple(gaps, i);
    const auto& st = committed.nodes[static_cast<std::size_t>(i)];
    const NodeEval ne = eval_node(patch, i, st, d);
    const double A = patch.geom.weight(i);
    ev.p_n(i) = ne.p_n;
    ev.p_t.row(i) = ne.p_t.transpose();
    ev.regime[static_cast<std::size_t>(i)] = ne.regime;
    ev.f_dyn(3 * i + ti.t1) = ne.p_t(0) * A;
    ev.f_dyn(3 * i + ti.t2) = ne.p_t(1) * A;
    ev.f_dyn(3 * i + ti.n) = (patch.p_n0(i) - ne.p_n) * A;
    if (!want_tangent) continue;
    Mat3& J = ev.tangent[static_cast<std::size_t>(i)];
    const bool closed = ne.p_n > 0.0;
    if (closed) J(ti.n, ti.n) = patch.prm.k_n * A; // d h_n / d d_n
    if (closed && patch.k_t(i) > 0.0) {
      if (ne.regime == ContactRegime::stick) {
        J(ti.t1, ti.t1) = patch.k_t(i) * A;
        J(ti.t2, ti.t2) = patch.k_t(i) * A;
      } else if (ne.regime == ContactRegime::slip) {
        const Vec2 dg_t(d(ti.t1) - st.g_prev(ti.t1), d(ti.t2) - st.g_prev(ti.t2));
        const double len = dg_t.norm();
        if (ne.dir_from_increment && len > 1e-300) {
          const Mat P2 = (Mat::Identity(2, 2) - ne.dir * ne.dir.transpose()) *
                         (patch.prm.mu * ne.p_n / len);
          J(ti.t1, ti.t1) = P2(0, 0) * A;
          J(ti.t1, ti.t2) = P2(0, 1) * A;
          J(ti.t2, ti.t1) = P2(1, 0) * A;
          J(ti.t2, ti.t2) = P2(1, 1) * A;
        }
        // Cone radius follows the pressure: d p_t / d d_n = -mu k_n dir.
        J(ti.t1, ti.n) = -patch.prm.mu * patch.prm.k_n * ne.dir(0) * A;
        J(ti.t2, ti.n) = -patch.prm.mu * patch.prm.k_n * ne.dir(1) * A;
      }
    }
  }
  return ev;
}

void commit_contact(const ContactPatch& patch, ContactState& state, const Vec& gaps) {
  require(gaps.size() == 3 * patch.n_nodes(), ErrCode::invalid, "gap vector dimension mismatch");
  const TangIdx ti = tang_indices(patch);
  for (Index i = 0; i < patch.n_nodes(); ++i) {
    auto& st = state.nodes[static_cast<std::size_t>(i)];
    const Vec3 d = gap_triple(gaps, i);
    const NodeEval ne = eval_node(patch, i, st, d);
    const double A = patch.geom.weight(i);
    const Vec2 dg_t(d(ti.t1) - st.g_prev(ti.t1), d(ti.t2) - st.g_prev(ti.t2));
    // Work balance: traction work minus stored-energy change; identically
    // zero in stick, positive during slip.
    if (patch.k_t(i) > 0.0) {
      const double work = 0.5 * (st.p_t + ne.p_t).dot(dg_t) * A;
      const double stored = (ne.p_t.squaredNorm() - st.p_t.squaredNorm()) / (2.0 * patch.k_t(i)) * A;
      st.dissipated += std::max(work - stored, 0.0);
    }
    st.p_t = ne.p_t;
    st.g_prev = d;
    if (ne.regime == ContactRegime::slip && ne.dir_from_increment) st.last_dir = ne.dir;
  }
}

std::pair<Vec2, ContactRegime> tangential_increment(const ContactPatch& patch, Index node,
                                                    const ContactNodeState& state, const Vec2& dg_t,
                                                    double p_n) {
  const TangIdx ti = tang_indices(patch);
  ContactNodeState st = state;
  Vec3 d = st.g_prev;
  d(ti.t1) += dg_t(0);
  d(ti.t2) += dg_t(1);
  // Normal gap chosen to reproduce the requested pressure.
  d(ti.n) = -(p_n - patch.p_n0(node)) / patch.prm.k_n;
  const NodeEval ne = eval_node(patch, node, st, d);
  return {ne.p_t - state.p_t, ne.regime};
}

Vec contact_nodal_forces(const ContactPatch& patch, const ContactState& state, const Vec& gaps) {
  ContactEval ev = eval_contact(patch, state, gaps, false);
  const TangIdx ti = tang_indices(patch);
  Vec f = Vec::Zero(gaps.size());
  for (Index i = 0; i < patch.n_nodes(); ++i) {
    const double A = patch.geom.weight(i);
    f(3 * i + ti.t1) = ev.p_t(i, 0) * A;
    f(3 * i + ti.t2) = ev.p_t(i, 1) * A;
    f(3 * i + ti.n) = ev.p_n(i) * A;
  }
  return f;
}

double contact_stored_energy(const ContactPatch& patch, const ContactState& state, const Vec& gaps) {
  ContactEval ev = eval_contact(patch, state, gaps, false);
  const TangIdx ti = tang_indices(patch);
  double e = 0.0;
  for (Index i = 0; i < patch.n_nodes(); ++i) {
    const double A = patch.geom.weight(i);
    const double d_n = gaps(3 * i + ti.n);
    const double d_star = patch.p_n0(i) / patch.prm.k_n; // opening at lift-off
    if (d_n < d_star) {
      e += 0.5 * patch.prm.k_n * d_n * d_n * A;
    } else {
      e += (0.5 * patch.prm.k_n * d_star * d_star + patch.p_n0(i) * (d_n - d_star)) * A;
    }
    if (patch.k_t(i) > 0.0) e += ev.p_t.row(i).squaredNorm() / (2.0 * patch.k_t(i)) * A;
  }
  return e;
}

Vec chi_uniform(const ContactGeometry& geom) { return Vec::Ones(geom.n_pairs()); }

Vec chi_smooth(const ContactGeometry& geom, double amp1, double amp2) {
  require(std::abs(amp1) < 1.0 && std::abs(amp2) < 1.0, ErrCode::invalid,
          "chi profile amplitudes must keep the distribution positive");
  Vec chi(geom.n_pairs());
  const double lo1 = geom.coords.col(0).minCoeff(), hi1 = geom.coords.col(0).maxCoeff();
  const double lo2 = geom.coords.col(1).minCoeff(), hi2 = geom.coords.col(1).maxCoeff();
  for (Index i = 0; i < geom.n_pairs(); ++i) {
    const double s1 = hi1 > lo1 ? (geom.coords(i, 0) - lo1) / (hi1 - lo1) : 0.5;
    const double s2 = hi2 > lo2 ? (geom.coords(i, 1) - lo2) / (hi2 - lo2) : 0.5;
    chi(i) = (1.0 + amp1 * std::cos(2.0 * M_PI * s1)) * (1.0 + amp2 * std::cos(2.0 * M_PI * s2));
  }
  const double mean = chi.dot(geom.weight) / geom.weight.sum();
  return chi / mean;
}

} // namespace panelrom
