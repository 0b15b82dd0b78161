#include "panelrom/hex8.hpp"

#include <cmath>
#include <limits>

#include "panelrom/error.hpp"

namespace panelrom::hex8 {

namespace {

constexpr double kGp = 0.57735026918962576; // 1/sqrt(3)

const double kXi[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                          {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

void shape(const double xi[3], Eigen::Matrix<double, 8, 1>& N, Eigen::Matrix<double, 8, 3>& dN) {
  for (int a = 0; a < 8; ++a) {
    const double sx = kXi[a][0], sy = kXi[a][1], sz = kXi[a][2];
    const double fx = 1.0 + sx * xi[0], fy = 1.0 + sy * xi[1], fz = 1.0 + sz * xi[2];
    N(a) = 0.125 * fx * fy * fz;
    dN(a, 0) = 0.125 * sx * fy * fz;
    dN(a, 1) = 0.125 * fx * sy * fz;
    dN(a, 2) = 0.125 * fx * fy * sz;
  }
}

// Voigt order (11, 22, 33, 23, 13, 12), engineering shear.
inline Eigen::Matrix<double, 6, 1> to_voigt(const Mat3& E) {
  Eigen::Matrix<double, 6, 1> v;
  v << E(0, 0), E(1, 1), E(2, 2), 2.0 * E(1, 2), 2.0 * E(0, 2), 2.0 * E(0, 1);
  return v;
}

inline Eigen::Matrix<double, 6, 6> stvk_c(double lambda, double mu) {
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C(i, j) = lambda;
  for (int i = 0; i < 3; ++i) C(i, i) += 2.0 * mu;
  for (int i = 3; i < 6; ++i) C(i, i) = mu;
  return C;
}

inline Mat3 stvk_stress(const Mat3& E, double lambda, double mu) {
  return lambda * E.trace() * Mat3::Identity() + 2.0 * mu * E;
}

inline double von_mises(const Mat3& S) {
  const double d01 = S(0, 0) - S(1, 1), d12 = S(1, 1) - S(2, 2), d20 = S(2, 2) - S(0, 0);
  return std::sqrt(0.5 * (d01 * d01 + d12 * d12 + d20 * d20) +
                   3.0 * (S(0, 1) * S(0, 1) + S(1, 2) * S(1, 2) + S(0, 2) * S(0, 2)));
}

} // namespace

ElemData precompute(const NodeMat& X, int elem_id) {
  ElemData ed;
  int q = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k, ++q) {
        const double xi[3] = {(2 * i - 1) * kGp, (2 * j - 1) * kGp, (2 * k - 1) * kGp};
        Eigen::Matrix<double, 8, 1> N;
        Eigen::Matrix<double, 8, 3> dN;
        shape(xi, N, dN);
        Mat3 J = X.transpose() * dN; // J(c, d) = d x_c / d xi_d
        const double det = J.determinant();
        require(det > 0.0, ErrCode::invalid,
                "non-positive reference Jacobian in element " + std::to_string(elem_id));
        auto& qp = ed.qp[static_cast<std::size_t>(q)];
        qp.N = N;
        qp.dNdX = dN * J.inverse();
        qp.wdet = det; // unit Gauss weights for 2x2x2
        ed.volume += det;
      }
  return ed;
}

double min_jacobian(const NodeMat& X) {
  double mn = std::numeric_limits<double>::max();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double xi[3] = {(2 * i - 1) * kGp, (2 * j - 1) * kGp, (2 * k - 1) * kGp};
        Eigen::Matrix<double, 8, 1> N;
        Eigen::Matrix<double, 8, 3> dN;
        shape(xi, N, dN);
        mn = std::min(mn, (X.transpose() * dN).determinant());
      }
  return mn;
}

void internal_force(const ElemData& ed, const NodeMat& u, double lambda, double mu,
                    NodeMat* f, ElemMat* K, int elem_id) {
  if (f) f->setZero();
  if (K) K->setZero();
  const auto C = stvk_c(lambda, mu);
  for (const auto& qp : ed.qp) {
    const Mat3 gradU = u.transpose() * qp.dNdX;
    const Mat3 F = Mat3::Identity() + gradU;
    require(F.determinant() > 0.0, ErrCode::solver,
            "element inversion in element " + std::to_string(elem_id));
    const Mat3 E = 0.5 * (F.transpose() * F - Mat3::Identity());
    const Mat3 S = stvk_stress(E, lambda, mu);
    if (f) {
      const Mat3 P = F * S;
      *f += qp.wdet * (qp.dNdX * P.transpose());
    }
    if (K) {
      // B_a maps du_a to dE (Voigt, engineering shear).
      Eigen::Matrix<double, 6, 24> B;
      for (int a = 0; a < 8; ++a) {
        const Vec3 G = qp.dNdX.row(a).transpose();
        for (int c = 0; c < 3; ++c) {
          const int col = 3 * a + c;
          B(0, col) = F(c, 0) * G(0);
          B(1, col) = F(c, 1) * G(1);
          B(2, col) = F(c, 2) * G(2);
          B(3, col) = F(c, 1) * G(2) + F(c, 2) * G(1);
          B(4, col) = F(c, 0) * G(2) + F(c, 2) * G(0);
          B(5, col) = F(c, 0) * G(1) + F(c, 1) * G(0);
        }
      }
      *K += qp.wdet * (B.transpose() * C * B);
      const Mat3 SG = S;
      for (int a = 0; a < 8; ++a) {
        const Vec3 Ga = qp.dNdX.row(a).transpose();
        for (int b = 0; b < 8; ++b) {
          const Vec3 Gb = qp.dNdX.row(b).transpose();
          const double g = qp.wdet * Ga.dot(SG * Gb);
          for (int c = 0; c < 3; ++c) (*K)(3 * a + c, 3 * b + c) += g;
        }
      }
    }
  }
}

ElemMat geometric_stiffness(const ElemData& ed, const NodeMat& u, double lambda, double mu) {
  ElemMat KG = ElemMat::Zero();
  for (const auto& qp : ed.qp) {
    const Mat3 gradU = u.transpose() * qp.dNdX;
    const Mat3 eps = 0.5 * (gradU + gradU.transpose());
    const Mat3 S = stvk_stress(eps, lambda, mu);
    for (int a = 0; a < 8; ++a) {
      const Vec3 Ga = qp.dNdX.row(a).transpose();
      for (int b = 0; b < 8; ++b) {
        const Vec3 Gb = qp.dNdX.row(b).transpose();
        const double g = qp.wdet * Ga.dot(S * Gb);
        for (int c = 0; c < 3; ++c) KG(3 * a + c, 3 * b + c) += g;
      }
    }
  }
  return KG;
}

ElemMat mass(const ElemData& ed, double rho) {
  ElemMat M = ElemMat::Zero();
  for (const auto& qp : ed.qp) {
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        const double m = rho * qp.wdet * qp.N(a) * qp.N(b);
        for (int c = 0; c < 3; ++c) M(3 * a + c, 3 * b + c) += m;
      }
  }
  return M;
}

double max_von_mises(const ElemData& ed, const NodeMat& u, double lambda, double mu) {
  double mx = 0.0;
  for (const auto& qp : ed.qp) {
    const Mat3 gradU = u.transpose() * qp.dNdX;
    const Mat3 F = Mat3::Identity() + gradU;
    const Mat3 E = 0.5 * (F.transpose() * F - Mat3::Identity());
    mx = std::max(mx, von_mises(stvk_stress(E, lambda, mu)));
  }
  return mx;
}

double strain_energy(const ElemData& ed, const NodeMat& u, double lambda, double mu) {
  double w = 0.0;
  for (const auto& qp : ed.qp) {
    const Mat3 gradU = u.transpose() * qp.dNdX;
    const Mat3 F = Mat3::Identity() + gradU;
    const Mat3 E = 0.5 * (F.transpose() * F - Mat3::Identity());
    const Mat3 S = stvk_stress(E, lambda, mu);
    w += 0.5 * qp.wdet * E.cwiseProduct(S).sum();
  }
  return w;
}

} // namespace panelrom::hex8
