#pragma once

#include <vector>

#include "panelrom/cms.hpp"
#include "panelrom/types.hpp"

namespace panelrom {

// Node-based unilateral + elastic dry-friction laws on the contact boundary.
// Gap coordinates are ordered pair-major x (x, y, z); the in-plane components
// are tangential, the normal component is identified by ContactPatch. With
// d = u_upper - u_lower, penetration is -d[normal] and the normal pressure is
// p_n = max(p_n0 + k_n * g_n, 0).

struct ContactParams {
  double k_n = 1e4;   // N/mm^3
  double mu = 0.3;    // -
  double g_sl = 1e-4; // mm (limit stick distance)
  bool tied = false;  // tie the pairs instead of applying the laws
};

struct ContactPatch {
  ContactGeometry geom;
  ContactParams prm;
  Vec p_n0; // MPa per node, p_bar * chi
  Vec k_t;  // N/mm^3 per node, mu * p_n0 / g_sl (zero where p_n0 = 0 or mu = 0)

  Index n_nodes() const { return geom.n_pairs(); }
  void validate() const;
};

ContactPatch make_contact_patch(ContactGeometry geom, ContactParams prm, const Vec& chi,
                                double p_bar_n0);

enum class ContactRegime { stick, slip, separated };

struct ContactNodeState {
  Vec2 p_t = Vec2::Zero();       // MPa, tangential traction
  Vec3 g_prev = Vec3::Zero();    // mm, last accepted gap triple
  Vec2 last_dir = Vec2::Zero();  // slip direction fallback
  double dissipated = 0.0;       // N*mm, monotone accumulator
};

struct ContactState {
  std::vector<ContactNodeState> nodes;
  double total_dissipated() const;
};

ContactState make_contact_state(const ContactPatch& patch);

// Normal pressure law, elementwise over nodes; g_n is the penetration.
Vec normal_pressure(const ContactPatch& patch, const Vec& g_n);

// Trial evaluation against the last committed state (no mutation).
struct ContactEval {
  Vec f_dyn;                          // forces on gap coordinates, preload subtracted
  std::vector<Mat3> tangent;          // d f_dyn / d gap triple, per node
  std::vector<ContactRegime> regime;
  Vec p_n;                            // MPa
  Mat p_t;                            // n x 2, MPa
};

ContactEval eval_contact(const ContactPatch& patch, const ContactState& committed, const Vec& gaps,
                         bool want_tangent);

// Accepts `gaps` as the new state: updates tractions, slip directions and the
// dissipation accumulators (work minus stored-energy change, exact in stick).
void commit_contact(const ContactPatch& patch, ContactState& state, const Vec& gaps);

// Single-node incremental law, exposed for unit-level checks: returns the
// traction increment and regime for a tangential gap increment at pressure p_n.
std::pair<Vec2, ContactRegime> tangential_increment(const ContactPatch& patch, Index node,
                                                    const ContactNodeState& state,
                                                    const Vec2& dg_t, double p_n);

// Absolute nodal forces (traction times weight, preload included), ordered
// pair-major x (x, y, z) like the gap coordinates.
Vec contact_nodal_forces(const ContactPatch& patch, const ContactState& state, const Vec& gaps);

// Elastic energy stored in the contact layer relative to the preload state.
double contact_stored_energy(const ContactPatch& patch, const ContactState& state, const Vec& gaps);

// Built-in pressure distributions, normalized to unit mean over the nodes.
Vec chi_uniform(const ContactGeometry& geom);
Vec chi_smooth(const ContactGeometry& geom, double amp1, double amp2);

} // namespace panelrom
