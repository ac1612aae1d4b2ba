#pragma once

#include <array>
#include <utility>

#include "diraclab/common.hpp"
#include "diraclab/fields.hpp"

namespace diraclab {

/// Dirac representation: beta = diag(1,1,-1,-1), alpha_k with off-diagonal
/// Pauli blocks. Generators of the Clifford algebra used everywhere below.
const Mat4& dirac_alpha(int k);
const Mat4& dirac_beta();
/// Spin matrix Sigma_k = diag(sigma_k, sigma_k).
const Mat4& dirac_sigma(int k);

/// Kinetic momentum pi = p - (e/c) A(x).
Vec3 kinetic_momentum(const Vec3& p, const FieldsAt& fa, const DiracParams& prm);

/// Weyl symbol of the Dirac-Hamiltonian:
///   H_D(p,x) = c alpha.(p - (e/c)A(x)) + m c^2 beta + e phi(x).
Mat4 eval_dirac_symbol(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm);
Mat4 eval_dirac_symbol(const Vec3& p, const FieldsAt& fa, const DiracParams& prm);

/// Order function M = sqrt((c p - e A)^2 + m^2 c^4) = (h+ - h-)/2.
double order_M(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm);
double order_M(const Vec3& p, const FieldsAt& fa, const DiracParams& prm);

/// Doubly degenerate symbol eigenvalues h± = e phi ± M.
std::pair<double, double> eigenvalues_h(const PhasePoint& pt, const FieldConfig& f,
                                        const DiracParams& prm);
double eval_h(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu);
double eval_h(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu);

/// Rank-2 eigenprojections pi0± = (1/2)(I ± (c alpha.pi + m c^2 beta)/M).
std::pair<Mat4, Mat4> projector_pi0(const PhasePoint& pt, const FieldConfig& f,
                                    const DiracParams& prm);
Mat4 projector_pi0(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu);
Mat4 projector_pi0(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu);

/// Analytic gradients of h_nu; dp = dh/dp, dx = dh/dx.
struct HGradient {
  Vec3 dp = Vec3::Zero();
  Vec3 dx = Vec3::Zero();
};
HGradient grad_h(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu);

/// Thomas / T-BMT precession vector for a g = 2 particle on branch nu, with
/// gamma = M/(m c^2) and branch velocity v = nu c^2 pi / M:
///   C_nu = -(nu e /(m c gamma)) [ B - (gamma/(gamma+1)) (v/c) x E ].
/// The overall sign was calibrated once against exact quantum spin evolution
/// (see test_spectral) and is frozen here.
Vec3 precession_C(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu);

/// Branch isometry V: C^2 -> ran pi0^nu with V*V = I2, VV* = pi0^nu.
/// Gram-Schmidt on the projector columns with deterministic largest-norm
/// pivoting; ties resolved toward the lower column index (relative tolerance
/// 1e-12, so the analytically tied column pairs order stably). For m > 0 this
/// gauge is smooth in (p, x).
Mat4x2 isometry_V(const PhasePoint& pt, const FieldConfig& f, const DiracParams& prm, Branch nu);
Mat4x2 isometry_V(const Vec3& p, const FieldsAt& fa, const DiracParams& prm, Branch nu);

}  // namespace diraclab
