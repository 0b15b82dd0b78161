#include "panelrom/condensation.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "panelrom/eigs.hpp"
#include "panelrom/error.hpp"
#include "panelrom/util.hpp"

namespace panelrom {

Index count_load_cases(Index R) {
  const Index num = 4 * R * R * R - 6 * R * R + 8 * R;
  require(num % 3 == 0, ErrCode::invalid, "load-case count is not an integer");
  return num / 3;
}

Index count_unknowns_per_row(Index R) {
  const Index num = R * R * R + 6 * R * R + 5 * R;
  require(num % 6 == 0, ErrCode::invalid, "unknown count is not an integer");
  return num / 6;
}

Vec GeomForceCoefficients::eval(const Vec& q_red) const {
  require(q_red.size() == R, ErrCode::invalid, "reduced state dimension mismatch");
  Vec m2(static_cast<Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    m2(static_cast<Index>(p)) = q_red(pairs[p][0]) * q_red(pairs[p][1]);
  Vec m3(static_cast<Index>(triples.size()));
  for (std::size_t t = 0; t < triples.size(); ++t)
    m3(static_cast<Index>(t)) = q_red(triples[t][0]) * q_red(triples[t][1]) * q_red(triples[t][2]);
  return beta2 * m2 + beta3 * m3;
}

Mat GeomForceCoefficients::jacobian(const Vec& q_red) const {
  require(q_red.size() == R, ErrCode::invalid, "reduced state dimension mismatch");
  Mat d2 = Mat::Zero(static_cast<Index>(pairs.size()), R);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const int j = pairs[p][0], k = pairs[p][1];
    d2(static_cast<Index>(p), j) += q_red(k);
    d2(static_cast<Index>(p), k) += q_red(j);
  }
  Mat d3 = Mat::Zero(static_cast<Index>(triples.size()), R);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const int j = triples[t][0], k = triples[t][1], l = triples[t][2];
    d3(static_cast<Index>(t), j) += q_red(k) * q_red(l);
    d3(static_cast<Index>(t), k) += q_red(j) * q_red(l);
    d3(static_cast<Index>(t), l) += q_red(j) * q_red(k);
  }
  return beta2 * d2 + beta3 * d3;
}

namespace {

// Smallest positive buckling factor over both load signs.
double bidirectional_gamma(const SpMat& K, const SpMat& KG, double gamma_max) {
  BucklingResult plus = buckling_factor(K, KG, gamma_max);
  BucklingResult minus = buckling_factor(K, (-KG).eval(), gamma_max);
  return std::min(plus.buckles ? plus.gamma : std::numeric_limits<double>::infinity(),
                  minus.buckles ? minus.gamma : std::numeric_limits<double>::infinity());
}

struct RampOutcome {
  double reached_fraction = 1.0; // of the ramp target load
  double sigma_fraction = 1.0;   // stress-interpolated fraction (<= reached)
  bool stress_bound = false;
  bool diverged = false;
  Vec q_final;
};

// Equal-increment nonlinear ramp with a per-increment stress check.
RampOutcome stress_ramp(const TransformedModel& thin, const Vec& f_target,
                        const std::vector<Index>& extra_fixed, const IcOptions& opt) {
  RampOutcome out;
  const int n = std::max(opt.ramp_increments, 1);
  Vec q = Vec::Zero(thin.dim());
  double sigma_prev = 0.0, frac_prev = 0.0;
  StaticOptions sopt = opt.statics;
  sopt.load_steps = 1;
  for (int k = 1; k <= n; ++k) {
    const double frac = static_cast<double>(k) / n;
    Vec q_try;
    try {
      q_try = solve_nonlinear_static(*thin.model, (frac * f_target).eval(), extra_fixed, sopt,
                                     nullptr, &q);
    } catch (const Error&) {
      out.diverged = true;
      out.reached_fraction = frac_prev;
      out.sigma_fraction = frac_prev;
      out.q_final = q;
      return out;
    }
    q = q_try;
    const double sigma = thin.model->max_von_mises(q);
    if (sigma >= opt.sigma_lim && k >= 1) {
      // Linear interpolation of the binding load between the increments.
      const double t = sigma > sigma_prev ? (opt.sigma_lim - sigma_prev) / (sigma - sigma_prev) : 1.0;
      out.sigma_fraction = frac_prev + t * (frac - frac_prev);
      out.reached_fraction = frac;
      out.stress_bound = true;
      out.q_final = q;
      return out;
    }
    sigma_prev = sigma;
    frac_prev = frac;
  }
  out.q_final = q;
  return out;
}

} // namespace

LoadScale scale_single_mode(const TransformedModel& thin, const Mat& T, Index j,
                            const std::vector<Index>& extra_fixed, const IcOptions& opt) {
  require(j >= 0 && j < T.cols(), ErrCode::invalid, "mode index out of range");
  LoadScale ls;
  const Vec Tj = T.col(j);
  const double tj_max = Tj.cwiseAbs().maxCoeff();
  require(tj_max > 0.0, ErrCode::invalid, "zero reduction column");
  ls.w_hat = opt.q_ref / tj_max;

  const Vec f_unit = thin.K * Tj;

  // Buckling load factor from the linearly pre-stressed state (Appendix-C
  // style verification happens in the tests; both load signs are covered
  // because each mode is applied with positive and negative scale).
  SpMat Kc = thin.K;
  apply_mask(Kc, extra_fixed);
  Eigen::SimplicialLDLT<SpMat> fact(Kc);
  require(fact.info() == Eigen::Success, ErrCode::solver, "singular stiffness in load scaling");
  Vec f_hat = ls.w_hat * f_unit;
  apply_mask(f_hat, extra_fixed);
  const Vec q_lin = fact.solve(f_hat);
  SpMat KG = thin.model->geometric_stiffness(thin.lift(q_lin));
  if (thin.has_transform) KG = (thin.V.transpose() * KG * thin.V).pruned();
  apply_mask(KG, extra_fixed);
  for (Index d : extra_fixed) KG.coeffRef(d, d) = 0.0;
  ls.gamma_crit = bidirectional_gamma(Kc, KG, opt.buckling_gamma_max);
  ls.buckling = std::isfinite(ls.gamma_crit);
  if (opt.buckling_cap && ls.buckling) ls.gamma_hat = std::min(1.0, 0.5 * ls.gamma_crit);

  // Incremental nonlinear ramp to w_hat * gamma_hat with the stress check.
  RampOutcome ramp = stress_ramp(thin, (ls.w_hat * ls.gamma_hat) * f_unit, extra_fixed, opt);
  if (ramp.stress_bound) {
    ls.sigma_hat = ramp.sigma_fraction;
    ls.cap = LoadScale::Cap::stress;
  } else if (ramp.diverged) {
    require(ramp.reached_fraction > 0.0, ErrCode::solver,
            "nonlinear ramp diverged at the first increment of mode " + std::to_string(j));
    ls.sigma_hat = 0.5 * ramp.reached_fraction; // halve the last converged load
    ls.cap = LoadScale::Cap::divergence;
  }
  ls.w = ls.w_hat * ls.gamma_hat * ls.sigma_hat;
  return ls;
}

std::vector<LoadCase> enumerate_load_cases(const std::vector<int>& active_modes,
                                           const std::vector<LoadScale>& scales, Index R) {
  for (int m : active_modes)
    require(scales[static_cast<std::size_t>(m)].w > 0.0, ErrCode::invalid,
            "missing load scale for mode " + std::to_string(m));
  std::vector<LoadCase> cases;
  int id = 0;
  auto add = [&](std::initializer_list<int> modes, std::initializer_list<int> signs) {
    LoadCase lc;
    lc.id = id++;
    lc.n_modes = static_cast<int>(modes.size());
    lc.w = Vec::Zero(R);
    int slot = 0;
    auto s = signs.begin();
    for (int m : modes) {
      lc.modes[static_cast<std::size_t>(slot)] = m;
      lc.signs[static_cast<std::size_t>(slot)] = *s;
      lc.w(m) = *s * scales[static_cast<std::size_t>(m)].w;
      ++slot;
      ++s;
    }
    cases.push_back(std::move(lc));
  };
  const auto& am = active_modes;
  const int n = static_cast<int>(am.size());
  for (int a = 0; a < n; ++a)
    for (int s : {+1, -1}) add({am[static_cast<std::size_t>(a)]}, {s});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int s1 : {+1, -1})
        for (int s2 : {+1, -1})
          add({am[static_cast<std::size_t>(a)], am[static_cast<std::size_t>(b)]}, {s1, s2});
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int s1 : {+1, -1})
          for (int s2 : {+1, -1})
            for (int s3 : {+1, -1})
              add({am[static_cast<std::size_t>(a)], am[static_cast<std::size_t>(b)],
                   am[static_cast<std::size_t>(c)]},
                  {s1, s2, s3});
  require(static_cast<Index>(cases.size()) == count_load_cases(n), ErrCode::invalid,
          "load-case enumeration does not match the counting identity");
  return cases;
}

CaseResponse solve_load_case(const TransformedModel& thin, const Mat& T, LoadCase& lc,
                             const std::vector<Index>& extra_fixed, const IcOptions& opt,
                             const Eigen::CompleteOrthogonalDecomposition<Mat>& t_pinv) {
  Vec f = thin.K * (T * lc.w);
  if (lc.n_modes > 1) {
    // Adopted single-mode scales: re-check buckling and stress for the
    // combined load; when either binds, all member scales shrink together.
    double factor = 1.0;
    if (opt.buckling_cap) {
      SpMat Kc = thin.K;
      apply_mask(Kc, extra_fixed);
      Eigen::SimplicialLDLT<SpMat> fact(Kc);
      require(fact.info() == Eigen::Success, ErrCode::solver, "singular stiffness in case re-check");
      Vec fm = f;
      apply_mask(fm, extra_fixed);
      const Vec q_lin = fact.solve(fm);
      SpMat KG = thin.model->geometric_stiffness(thin.lift(q_lin));
      if (thin.has_transform) KG = (thin.V.transpose() * KG * thin.V).pruned();
      apply_mask(KG, extra_fixed);
      for (Index d : extra_fixed) KG.coeffRef(d, d) = 0.0;
      BucklingResult b = buckling_factor(Kc, KG, opt.buckling_gamma_max);
      if (b.buckles && 0.5 * b.gamma < 1.0) factor = 0.5 * b.gamma;
    }
    RampOutcome ramp = stress_ramp(thin, (factor * f).eval(), extra_fixed, opt);
    if (ramp.stress_bound || ramp.diverged) {
      const double s = ramp.stress_bound ? ramp.sigma_fraction : 0.5 * ramp.reached_fraction;
      require(s > 0.0, ErrCode::solver, "load case " + std::to_string(lc.id) + " collapsed to zero scale");
      factor *= s;
    }
    lc.shrink = factor;
    lc.w *= factor;
    f *= factor;
  }
  StaticOptions sopt = opt.statics;
  sopt.load_steps = opt.ramp_increments;
  CaseResponse resp;
  resp.id = lc.id;
  resp.q = solve_nonlinear_static(*thin.model, f, extra_fixed, sopt);
  resp.q_red = t_pinv.solve(resp.q);
  return resp;
}

CampaignResult run_campaign(const TransformedModel& thin, const ComponentBasis& basis,
                            const std::vector<Index>& extra_fixed, const IcOptions& opt) {
  CampaignResult out;
  const Index R = basis.dim_reduced();
  out.scales.resize(static_cast<std::size_t>(R));
  for (Index j = 0; j < R; ++j)
    if (!basis.strain_free[static_cast<std::size_t>(j)]) out.active_modes.push_back(static_cast<int>(j));

  parallel_for(static_cast<Index>(out.active_modes.size()), opt.workers, [&](Index i) {
    const int j = out.active_modes[static_cast<std::size_t>(i)];
    out.scales[static_cast<std::size_t>(j)] = scale_single_mode(thin, basis.T, j, extra_fixed, opt);
  });

  out.cases = enumerate_load_cases(out.active_modes, out.scales, R);
  out.responses.resize(out.cases.size());
  Eigen::CompleteOrthogonalDecomposition<Mat> t_pinv(basis.T);
  t_pinv.setThreshold(1e-12);
  parallel_for(static_cast<Index>(out.cases.size()), opt.workers, [&](Index i) {
    out.responses[static_cast<std::size_t>(i)] =
        solve_load_case(thin, basis.T, out.cases[static_cast<std::size_t>(i)], extra_fixed, opt, t_pinv);
  });
  return out;
}

GeomForceCoefficients regress_coefficients(const std::vector<CaseResponse>& responses,
                                           const std::vector<LoadCase>& cases, const Mat& Kred,
                                           const std::vector<bool>& excluded, Vec* row_rel_residual) {
  const Index R = Kred.rows();
  require(static_cast<Index>(excluded.size()) == R, ErrCode::invalid, "exclusion mask size mismatch");
  require(responses.size() == cases.size() && !responses.empty(), ErrCode::invalid,
          "empty or inconsistent campaign data");
  GeomForceCoefficients c;
  c.R = R;
  c.excluded = excluded;
  std::vector<int> active;
  for (Index j = 0; j < R; ++j)
    if (!excluded[static_cast<std::size_t>(j)]) active.push_back(static_cast<int>(j));
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a; b < active.size(); ++b)
      c.pairs.push_back({active[a], active[b]});
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a; b < active.size(); ++b)
      for (std::size_t d = b; d < active.size(); ++d)
        c.triples.push_back({active[a], active[b], active[d]});
  const Index n_u = static_cast<Index>(c.pairs.size() + c.triples.size());
  require(count_unknowns_per_row(static_cast<Index>(active.size())) == n_u, ErrCode::invalid,
          "unknown enumeration does not match the counting identity");
  const Index n_cases = static_cast<Index>(responses.size());
  require(n_cases >= n_u, ErrCode::invalid, "fewer load cases than unknowns per row");

  Mat phi(n_cases, n_u);
  Mat target(n_cases, R);
  for (Index m = 0; m < n_cases; ++m) {
    const Vec& qr = responses[static_cast<std::size_t>(m)].q_red;
    require(qr.size() == R, ErrCode::invalid, "projected response dimension mismatch");
    for (std::size_t p = 0; p < c.pairs.size(); ++p)
      phi(m, static_cast<Index>(p)) = qr(c.pairs[p][0]) * qr(c.pairs[p][1]);
    for (std::size_t t = 0; t < c.triples.size(); ++t)
      phi(m, static_cast<Index>(c.pairs.size() + t)) =
          qr(c.triples[t][0]) * qr(c.triples[t][1]) * qr(c.triples[t][2]);
    target.row(m) = (Kred * (cases[static_cast<std::size_t>(m)].w - qr)).transpose();
  }

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(phi);
  cod.setThreshold(1e-12);
  require(cod.rank() == n_u, ErrCode::solver,
          "regressor rank deficiency (degenerate load scaling)");
  Mat target_active(n_cases, static_cast<Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) target_active.col(static_cast<Index>(a)) = target.col(active[a]);
  Mat coef = cod.solve(target_active); // n_u x n_active

  c.beta2 = Mat::Zero(R, static_cast<Index>(c.pairs.size()));
  c.beta3 = Mat::Zero(R, static_cast<Index>(c.triples.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t p = 0; p < c.pairs.size(); ++p)
      c.beta2(active[a], static_cast<Index>(p)) = coef(static_cast<Index>(p), static_cast<Index>(a));
    for (std::size_t t = 0; t < c.triples.size(); ++t)
      c.beta3(active[a], static_cast<Index>(t)) =
          coef(static_cast<Index>(c.pairs.size() + t), static_cast<Index>(a));
  }
  if (row_rel_residual) {
    *row_rel_residual = Vec::Zero(R);
    Mat resid = phi * coef - target_active;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double ref = target_active.col(static_cast<Index>(a)).norm();
      (*row_rel_residual)(active[a]) = resid.col(static_cast<Index>(a)).norm() / std::max(ref, 1e-30);
    }
  }
  return c;
}

void write_coefficients(const std::string& path, const GeomForceCoefficients& c) {
  std::ofstream os(path);
  require(os.good(), ErrCode::io, "cannot write " + path);
  os << "# geometric force coefficients: i j k [l] value (1-based)\n";
  os << "modes " << c.R << "\nexcluded";
  for (Index j = 0; j < c.R; ++j) os << " " << (c.excluded[static_cast<std::size_t>(j)] ? 1 : 0);
  os << "\n";
  for (Index i = 0; i < c.R; ++i) {
    for (std::size_t p = 0; p < c.pairs.size(); ++p)
      if (c.beta2(i, static_cast<Index>(p)) != 0.0)
        os << (i + 1) << " " << (c.pairs[p][0] + 1) << " " << (c.pairs[p][1] + 1) << " "
           << format_full(c.beta2(i, static_cast<Index>(p))) << "\n";
    for (std::size_t t = 0; t < c.triples.size(); ++t)
      if (c.beta3(i, static_cast<Index>(t)) != 0.0)
        os << (i + 1) << " " << (c.triples[t][0] + 1) << " " << (c.triples[t][1] + 1) << " "
           << (c.triples[t][2] + 1) << " " << format_full(c.beta3(i, static_cast<Index>(t))) << "\n";
  }
}

GeomForceCoefficients read_coefficients(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), ErrCode::io, "cannot read " + path);
  std::string line;
  GeomForceCoefficients c;
  std::vector<std::string> body;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto tok = split(line, ' ');
    if (tok[0] == "modes") {
      c.R = std::stol(tok[1]);
    } else if (tok[0] == "excluded") {
      for (std::size_t i = 1; i < tok.size(); ++i) c.excluded.push_back(tok[i] == "1");
    } else {
      body.push_back(line);
    }
  }
  require(c.R > 0 && static_cast<Index>(c.excluded.size()) == c.R, ErrCode::io,
          "malformed coefficient file " + path);
  std::vector<int> active;
  for (Index j = 0; j < c.R; ++j)
    if (!c.excluded[static_cast<std::size_t>(j)]) active.push_back(static_cast<int>(j));
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a; b < active.size(); ++b) c.pairs.push_back({active[a], active[b]});
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a; b < active.size(); ++b)
      for (std::size_t d = b; d < active.size(); ++d)
        c.triples.push_back({active[a], active[b], active[d]});
  c.beta2 = Mat::Zero(c.R, static_cast<Index>(c.pairs.size()));
  c.beta3 = Mat::Zero(c.R, static_cast<Index>(c.triples.size()));
  std::map<std::array<int, 2>, Index> pair_idx;
  std::map<std::array<int, 3>, Index> triple_idx;
  for (std::size_t p = 0; p < c.pairs.size(); ++p) pair_idx[c.pairs[p]] = static_cast<Index>(p);
  for (std::size_t t = 0; t < c.triples.size(); ++t) triple_idx[c.triples[t]] = static_cast<Index>(t);
  for (const auto& l : body) {
    auto tok = split(l, ' ');
    if (tok.size() == 4) {
      std::array<int, 2> key = {std::stoi(tok[1]) - 1, std::stoi(tok[2]) - 1};
      c.beta2(std::stoi(tok[0]) - 1, pair_idx.at(key)) = std::stod(tok[3]);
    } else if (tok.size() == 5) {
      std::array<int, 3> key = {std::stoi(tok[1]) - 1, std::stoi(tok[2]) - 1, std::stoi(tok[3]) - 1};
      c.beta3(std::stoi(tok[0]) - 1, triple_idx.at(key)) = std::stod(tok[4]);
    } else {
      fail(ErrCode::io, "malformed coefficient line: " + l);
    }
  }
  return c;
}

} // namespace panelrom
