#include "diraclab/dirac.hpp"

#include <cmath>

namespace diraclab {

namespace {

Mat4 make_alpha(int k) {
  Mat4 a = Mat4::Zero();
  a.block<2, 2>(0, 2) = pauli(k);
  a.block<2, 2>(2, 0) = pauli(k);
  return a;
}

Mat4 make_sigma(int k) {
  Mat4 s = Mat4::Zero();
  s.block<2, 2>(0, 0) = pauli(k);
  s.block<2, 2>(2, 2) = pauli(k);
  return s;
}

}  // namespace

const Mat4& dirac_alpha(int k) {
  static const Mat4 a[3] = {make_alpha(0), make_alpha(1), make_alpha(2)};
  return a[k];
}

const Mat4& dirac_beta() {
  static const Mat4 b = (Mat4() << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1).finished();
  return b;
}

const Mat4& dirac_sigma(int k) {
  static const Mat4 s[3] = {make_sigma(0), make_sigma(1), make_sigma(2)};
  return s[k];
}

Vec3 kinetic_momentum(const Vec3& p, const FieldsAt& fa, const DiracParams& prm) {
  return p - (prm.e / prm.c) * fa.A;
}

Mat4 eval_dirac_symbol(const Vec3& p, const FieldsAt& fa, const DiracParams& prm) {
  const Vec3 kin = kinetic_momentum(p, fa, prm);
  Mat4 H = prm.e * fa.phi * Mat4::Identity() + prm.m * prm.c * prm.c * dirac_beta();
  for (int k = 0; k < 3; ++k) H += prm.c * kin[k] * dirac_alpha(k);
  return H;
}

Mat4 eval_dirac_symbol(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm) {
  return eval_dirac_symbol(pt.p, fields_at(f, pt.x), prm);
}

double order_M(const Vec3& p, const FieldsAt& fa, const DiracParams& prm) {
  const Vec3 kin = kinetic_momentum(p, fa, prm);
  const double mc2 = prm.m * prm.c * prm.c;
  return std::sqrt(prm.c * prm.c * kin.squaredNorm() + mc2 * mc2);
}

double order_M(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm) {
  return order_M(pt.p, fields_at(f, pt.x), prm);
}

std::pair<double, double> eigenvalues_h(const PhasePoint& pt, const FieldConfig& f,
                                        const DiracParams& prm) {
  const FieldsAt fa = fields_at(f, pt.x);
  const double M = order_M(pt.p, fa, prm);
  const double ephi = prm.e * fa.phi;
  return {ephi + M, ephi - M};
}

double eval_h(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu) {
  return prm.e * fa.phi + sign_of(nu) * order_M(p, fa, prm);
}

double eval_h(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu) {
  return eval_h(pt.p, fields_at(f, pt.x), prm, nu);
}

Mat4 projector_pi0(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu) {
  const Vec3 kin = kinetic_momentum(p, fa, prm);
  const double M = order_M(p, fa, prm);
  Mat4 core = prm.m * prm.c * prm.c * dirac_beta();
  for (int k = 0; k < 3; ++k) core += prm.c * kin[k] * dirac_alpha(k);
  return 0.5 * (Mat4::Identity() + (sign_of(nu) / M) * core);
}

Mat4 projector_pi0(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu) {
  return projector_pi0(pt.p, fields_at(f, pt.x), prm, nu);
}

std::pair<Mat4, Mat4> projector_pi0(const PhasePoint& pt, const FieldConfig& f,
                                    const DiracParams& prm) {
  const FieldsAt fa = fields_at(f, pt.x);
  const Mat4 plus = projector_pi0(pt.p, fa, prm, Branch::plus);
  return {plus, Mat4::Identity() - plus};
}

HGradient grad_h(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu) {
  const FieldsAt fa = fields_at(f, pt.x);
  const Vec3 kin = kinetic_momentum(pt.p, fa, prm);
  const double M = order_M(pt.p, fa, prm);
  const double s = sign_of(nu);

  HGradient g;
  g.dp = s * prm.c * prm.c / M * kin;
  // dM/dx_j = -(e c / M) sum_i kin_i dA_i/dx_j
  const Mat3 J = f.grad_A(pt.x);
  const Vec3 dM_dx = -(prm.e * prm.c / M) * (J.transpose() * kin);
  g.dx = prm.e * f.grad_phi(pt.x) + s * dM_dx;
  return g;
}

Vec3 precession_C(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu) {
  const FieldsAt fa = fields_at(f, pt.x);
  const EBFields eb = fields_EB(f, pt.x);
  const Vec3 kin = kinetic_momentum(pt.p, fa, prm);
  const double M = order_M(pt.p, fa, prm);
  const double mc2 = prm.m * prm.c * prm.c;
  const double gamma = M / mc2;
  const double s = sign_of(nu);
  const Vec3 beta_v = s * prm.c * kin / M;  // v/c on branch nu
  return -(s * prm.e / (prm.m * prm.c * gamma)) *
         (eb.B - (gamma / (gamma + 1.0)) * beta_v.cross(eb.E));
}

Mat4x2 isometry_V(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu) {
  const Mat4 proj = projector_pi0(p, fa, prm, nu);

  // Largest-norm pivoting with a relative tie tolerance; the two dominant
  // columns of pi0 are analytically tied, so the tolerance keeps the pick
  // stable (lowest index first) and the resulting gauge smooth.
  std::array<bool, 4> used{false, false, false, false};
  Mat4x2 V = Mat4x2::Zero();
  Eigen::Matrix<cplx, 4, 4> cols = proj;
  for (int r = 0; r < 2; ++r) {
    int pick = -1;
    double best = -1.0;
    for (int cidx = 0; cidx < 4; ++cidx) {
      if (used[cidx]) continue;
      const double n2 = cols.col(cidx).squaredNorm();
      if (n2 > best * (1.0 + 1e-12)) {
        best = n2;
        pick = cidx;
      }
    }
    used[pick] = true;
    Eigen::Vector4cd v = cols.col(pick);
    for (int q = 0; q < r; ++q) v -= (V.col(q).adjoint() * v)(0) * V.col(q);
    V.col(r) = v / v.norm();
    // Orthogonalize the remaining columns against the accepted one so the
    // next pivot decision sees residual norms.
    for (int cidx = 0; cidx < 4; ++cidx) {
      if (used[cidx]) continue;
      cols.col(cidx) -= (V.col(r).adjoint() * cols.col(cidx))(0) * V.col(r);
    }
  }
  return V;
}

Mat4x2 isometry_V(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu) {
  return isometry_V(pt.p, fields_at(f, pt.x), prm, nu);
}

}  // namespace diraclab
