#pragma once

#include <array>
#include <functional>
#include <vector>

#include "panelrom/cms.hpp"
#include "panelrom/statics.hpp"

namespace panelrom {

// Load-case and coefficient counts for R component modes entering the
// polynomial (exact integers for every R >= 1).
Index count_load_cases(Index R);       // 4R^3/3 - 2R^2 + 8R/3
Index count_unknowns_per_row(Index R); // R^3/6 + R^2 + 5R/6

// Cubic polynomial reduced geometric force: quadratic coefficients over
// pairs j <= k and cubic coefficients over triples j <= k <= l of the
// non-excluded modes. Rows and terms of rigid-body-tagged modes are zero.
struct GeomForceCoefficients {
  Index R = 0;
  std::vector<bool> excluded;                 // rigid-body exclusion mask
  std::vector<std::array<int, 2>> pairs;      // full-mode indices, j <= k
  std::vector<std::array<int, 3>> triples;    // j <= k <= l
  Mat beta2; // R x pairs.size()
  Mat beta3; // R x triples.size()

  Vec eval(const Vec& q_red) const;
  Mat jacobian(const Vec& q_red) const;
};

struct LoadScale {
  double w_hat = 0.0;      // linear estimate for the target displacement
  double gamma_crit = std::numeric_limits<double>::infinity();
  double gamma_hat = 1.0;  // buckling cap, in (0, 1]
  double sigma_hat = 1.0;  // stress cap, in (0, 1]
  double w = 0.0;          // final scale = w_hat * gamma_hat * sigma_hat
  bool buckling = false;
  enum class Cap { none, stress, divergence } cap = Cap::none;
};

struct IcOptions {
  double q_ref = 3.0;       // mm, target displacement
  double sigma_lim = 500.0; // MPa, stress limit
  int ramp_increments = 10; // equal increments of the stress-check ramp
  double buckling_gamma_max = 1e4;
  bool buckling_cap = true; // set false only for assessment runs
  StaticOptions statics;
  int workers = 1;
};

struct LoadCase {
  int id = 0;
  int n_modes = 0;
  std::array<int, 3> modes = {-1, -1, -1}; // full-mode indices, ascending
  std::array<int, 3> signs = {0, 0, 0};
  Vec w;               // R-dim signed scale vector
  double shrink = 1.0; // common factor from the multi-mode re-check
};

struct CaseResponse {
  int id = 0;
  Vec q;     // full-order response (thin-region coordinates)
  Vec q_red; // T^+ q
};

// Single-mode load scaling: target-displacement estimate, buckling load
// factor from a linear analysis of the pre-stressed state (both load signs),
// and an incremental nonlinear ramp against the stress limit.
LoadScale scale_single_mode(const TransformedModel& thin, const Mat& T, Index j,
                            const std::vector<Index>& extra_fixed, const IcOptions& opt);

// All single/two/three-mode cases with every sign combination, ordered
// lexicographically in mode indices then sign pattern (plus before minus).
std::vector<LoadCase> enumerate_load_cases(const std::vector<int>& active_modes,
                                           const std::vector<LoadScale>& scales, Index R);

// Multi-mode re-check (buckling + stress with adopted scales) followed by the
// nonlinear solve of one case. Single-mode cases ramp straight to their scale.
CaseResponse solve_load_case(const TransformedModel& thin, const Mat& T, LoadCase& lc,
                             const std::vector<Index>& extra_fixed, const IcOptions& opt,
                             const Eigen::CompleteOrthogonalDecomposition<Mat>& t_pinv);

struct CampaignResult {
  std::vector<int> active_modes;       // non-excluded mode indices
  std::vector<LoadScale> scales;       // per mode (R entries, zero where excluded)
  std::vector<LoadCase> cases;
  std::vector<CaseResponse> responses; // keyed by case id (same order)
};

CampaignResult run_campaign(const TransformedModel& thin, const ComponentBasis& basis,
                            const std::vector<Index>& extra_fixed, const IcOptions& opt);

// Independent least-squares estimate per force row from the projected case
// responses; rigid rows/terms excluded before solving, zero-filled after.
GeomForceCoefficients regress_coefficients(const std::vector<CaseResponse>& responses,
                                           const std::vector<LoadCase>& cases, const Mat& Kred,
                                           const std::vector<bool>& excluded,
                                           Vec* row_rel_residual = nullptr);

// Flat-table export/import: lines of (i, j, k, [l], value), 1-based indices.
void write_coefficients(const std::string& path, const GeomForceCoefficients& c);
GeomForceCoefficients read_coefficients(const std::string& path);

} // namespace panelrom
