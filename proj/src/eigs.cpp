#include "panelrom/eigs.hpp"

#include <Eigen/SparseCholesky>
#include <limits>
#include <random>

#include "panelrom/error.hpp"

namespace panelrom {

namespace {

constexpr Index kDenseThreshold = 700;

EigPairs dense_lowest(const SpMat& K, const SpMat& M, Index n_modes) {
  Mat Kd = Mat(K), Md = Mat(M);
  Kd = 0.5 * (Kd + Kd.transpose()).eval();
  Md = 0.5 * (Md + Md.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Kd, Md);
  require(es.info() == Eigen::Success, ErrCode::solver, "dense generalized eigensolver failed");
  EigPairs out;
  out.lambda = es.eigenvalues().head(n_modes);
  out.phi = es.eigenvectors().leftCols(n_modes);
  return out;
}

Mat random_block(Index n, Index s) {
  std::mt19937_64 rng(0x9e3779b9u + static_cast<std::uint64_t>(n) * 1315423911u + static_cast<std::uint64_t>(s));
  std::normal_distribution<double> dist;
  Mat X(n, s);
  for (Index j = 0; j < s; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = dist(rng);
  return X;
}

// Modified Gram-Schmidt in the B inner product, one re-orthogonalization pass.
void b_orthonormalize(Mat& X, const SpMat& B) {
  const Index s = X.cols();
  Mat BX = B * X;
  for (Index j = 0; j < s; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Index k = 0; k < j; ++k) {
        const double c = X.col(k).dot(BX.col(j));
        X.col(j) -= c * X.col(k);
        BX.col(j) -= c * (B * X.col(k)); // keep BX consistent
      }
    BX.col(j) = B * X.col(j);
    const double nrm = std::sqrt(std::max(X.col(j).dot(BX.col(j)), 0.0));
    require(nrm > 1e-14, ErrCode::solver, "subspace became rank deficient in eigen iteration");
    X.col(j) /= nrm;
    BX.col(j) /= nrm;
  }
}

} // namespace

EigPairs eig_lowest(const SpMat& K, const SpMat& M, Index n_modes, double tol) {
  const Index n = K.rows();
  require(K.cols() == n && M.rows() == n && M.cols() == n, ErrCode::invalid, "eig: dimension mismatch");
  require(n_modes >= 1 && n_modes <= n, ErrCode::invalid, "eig: invalid mode count");
  if (n <= kDenseThreshold || n_modes > n / 3) return dense_lowest(K, M, n_modes);

  // Shift keeps the factorization positive definite when K is singular
  // (free-free models); Ritz values are computed from the unshifted K.
  double trK = 0.0, trM = 0.0;
  for (Index i = 0; i < n; ++i) {
    trK += K.coeff(i, i);
    trM += M.coeff(i, i);
  }
  const double sigma = 1e-8 * (trK / std::max(trM, 1e-30));
  SpMat A = K + sigma * M;
  Eigen::SimplicialLDLT<SpMat> fact(A);
  require(fact.info() == Eigen::Success, ErrCode::solver, "factorization failed in eigen iteration");

  const Index s = std::min(n, std::max(2 * n_modes, n_modes + 8));
  Mat X = random_block(n, s);
  b_orthonormalize(X, M);
  EigPairs out;
  const int max_iter = 500;
  Vec lambda_prev = Vec::Constant(n_modes, std::numeric_limits<double>::max());
  const double lambda_floor = 1e-12 * trK / std::max(trM, 1e-30);
  for (int it = 0; it < max_iter; ++it) {
    Mat Y = fact.solve(M * X);
    b_orthonormalize(Y, M);
    Mat Kp = Y.transpose() * (K * Y).eval();
    Kp = 0.5 * (Kp + Kp.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Kp);
    require(es.info() == Eigen::Success, ErrCode::solver, "Ritz solve failed");
    X = Y * es.eigenvectors();
    const Vec lambda = es.eigenvalues().head(n_modes);
    // Ritz values stagnant relative to `tol`, residuals within the contract.
    bool stable = true;
    for (Index j = 0; j < n_modes; ++j) {
      const double ref = std::max(std::abs(lambda(j)), lambda_floor);
      if (std::abs(lambda(j) - lambda_prev(j)) > tol * ref) stable = false;
    }
    lambda_prev = lambda;
    if (stable && it >= 2) {
      bool resid_ok = true;
      for (Index j = 0; j < n_modes; ++j) {
        const Vec Kx = K * X.col(j);
        const Vec r = Kx - lambda(j) * (M * X.col(j));
        if (r.norm() > 1e-6 * std::max(Kx.norm(), lambda_floor * (M * X.col(j)).norm())) {
          resid_ok = false;
          break;
        }
      }
      if (resid_ok) {
        out.lambda = lambda;
        out.phi = X.leftCols(n_modes);
        return out;
      }
    }
  }
  fail(ErrCode::solver, "eigen iteration did not converge");
}

BucklingResult buckling_factor(const SpMat& K, const SpMat& KG, double gamma_max) {
  const Index n = K.rows();
  require(KG.rows() == n && KG.cols() == n, ErrCode::invalid, "buckling: dimension mismatch");
  BucklingResult res;
  // (K + gamma KG) phi = 0  <=>  B phi = theta K phi with B = -KG, theta = 1/gamma.
  // Want the largest positive theta.
  if (n <= 1600) {
    Mat Kd = Mat(K);
    Kd = 0.5 * (Kd + Kd.transpose()).eval();
    Eigen::LLT<Mat> llt(Kd);
    require(llt.info() == Eigen::Success, ErrCode::solver, "buckling base stiffness not positive definite");
    Mat B = -Mat(KG);
    B = 0.5 * (B + B.transpose()).eval();
    Mat L = llt.matrixL();
    Mat T1 = L.triangularView<Eigen::Lower>().solve(B);
    Mat A = L.triangularView<Eigen::Lower>().solve(T1.transpose()).transpose();
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    require(es.info() == Eigen::Success, ErrCode::solver, "buckling eigensolver failed");
    const double theta_max = es.eigenvalues().maxCoeff();
    if (theta_max > 1.0 / gamma_max) {
      res.buckles = true;
      res.gamma = 1.0 / theta_max;
      Index idx = 0;
      es.eigenvalues().maxCoeff(&idx);
      Vec y = es.eigenvectors().col(idx);
      res.mode = L.transpose().triangularView<Eigen::Upper>().solve(y);
      res.mode /= res.mode.cwiseAbs().maxCoeff();
    }
    return res;
  }
  // Subspace iteration on K^{-1} B, K-orthonormal block.
  Eigen::SimplicialLDLT<SpMat> fact(K);
  require(fact.info() == Eigen::Success, ErrCode::solver, "buckling factorization failed");
  SpMat B = (-KG).eval();
  const Index s = std::min<Index>(16, n);
  Mat X = random_block(n, s);
  b_orthonormalize(X, K);
  double theta_prev = 0.0;
  for (int it = 0; it < 400; ++it) {
    Mat Y = fact.solve((B * X).eval());
    // Guard against B-nullspace collapse by mixing in the previous block.
    if (Y.norm() < 1e-300) return res;
    b_orthonormalize(Y, K);
    Mat Bp = Y.transpose() * (B * Y).eval();
    Bp = 0.5 * (Bp + Bp.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Bp);
    X = Y * es.eigenvectors();
    const double theta = es.eigenvalues().maxCoeff();
    if (it > 4 && std::abs(theta - theta_prev) <= 1e-10 * std::max(std::abs(theta), 1e-30)) {
      if (theta > 1.0 / gamma_max) {
        res.buckles = true;
        res.gamma = 1.0 / theta;
        Index idx = 0;
        es.eigenvalues().maxCoeff(&idx);
        res.mode = X.col(idx);
        res.mode /= res.mode.cwiseAbs().maxCoeff();
      }
      return res;
    }
    theta_prev = theta;
  }
  fail(ErrCode::solver, "buckling subspace iteration did not converge");
}

} // namespace panelrom
