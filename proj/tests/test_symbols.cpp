#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "diraclab/dirac.hpp"
#include "diraclab/fields.hpp"
#include "diraclab/rng.hpp"

using namespace diraclab;

namespace {

FieldConfig test_fields() {
  FieldConfig f;
  f.L = 2.0 * pi;
  f.phi = {{{1, 0, 0}, 0.11, 0.3}, {{0, 2, -1}, 0.07, 1.1}, {{1, 1, 1}, 0.05, -0.7}};
  f.A[0] = {{{0, 1, 0}, 0.09, 0.2}, {{2, 0, 1}, 0.04, 2.0}};
  f.A[1] = {{{1, 0, 1}, 0.08, -1.2}};
  f.A[2] = {{{0, 0, 2}, 0.06, 0.5}, {{1, -1, 0}, 0.05, 0.9}};
  return f;
}

PhasePoint random_point(Rng& rng, double P, double L) {
  PhasePoint pt;
  for (int i = 0; i < 3; ++i) pt.p[i] = rng.uniform(-P, P);
  for (int i = 0; i < 3; ++i) pt.x[i] = rng.uniform(0.0, L);
  return pt;
}

}  // namespace

TEST_CASE("dirac matrices satisfy the Clifford relations") {
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const Mat4 anti = dirac_alpha(k) * dirac_alpha(l) + dirac_alpha(l) * dirac_alpha(k);
      const Mat4 want = (k == l) ? Mat4(2.0 * Mat4::Identity()) : Mat4(Mat4::Zero());
      CHECK((anti - want).norm() == 0.0);
    }
  CHECK((dirac_beta() * dirac_beta() - Mat4::Identity()).norm() == 0.0);
  for (int k = 0; k < 3; ++k) {
    const Mat4 anti = dirac_alpha(k) * dirac_beta() + dirac_beta() * dirac_alpha(k);
    CHECK(anti.norm() == 0.0);
  }
  CHECK((dirac_beta() - Eigen::Vector4cd(1, 1, -1, -1).asDiagonal().toDenseMatrix()).norm() ==
        0.0);
}

TEST_CASE("dirac symbol: free point, scalar shift, eigenvalue oracle") {
  const DiracParams prm;
  FieldConfig free;

  const Mat4 H0 = eval_dirac_symbol(PhasePoint{}, free, prm);
  CHECK((H0 - prm.m * prm.c * prm.c * dirac_beta()).norm() < 1e-15);

  // Constant scalar potential shifts by e V0.
  FieldConfig shifted;
  shifted.phi = {{{0, 0, 0}, 0.37, 0.0}};
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint pt = random_point(rng, 2.0, free.L);
    const Mat4 d = eval_dirac_symbol(pt, shifted, prm) - eval_dirac_symbol(pt, free, prm);
    CHECK((d - 0.37 * Mat4::Identity()).norm() < 1e-13);
  }

  // Dense 4x4 eigensolve oracle: spectrum of H_D(pt) is {h+, h+, h-, h-}.
  const FieldConfig f = test_fields();
  for (int i = 0; i < 100; ++i) {
    const PhasePoint pt = random_point(rng, 2.0, f.L);
    const Mat4 H = eval_dirac_symbol(pt, f, prm);
    CHECK((H - H.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat4> es(H);
    const auto [hp, hm] = eigenvalues_h(pt, f, prm);
    CHECK(es.eigenvalues()[0] == doctest::Approx(hm).epsilon(1e-12));
    CHECK(es.eigenvalues()[1] == doctest::Approx(hm).epsilon(1e-12));
    CHECK(es.eigenvalues()[2] == doctest::Approx(hp).epsilon(1e-12));
    CHECK(es.eigenvalues()[3] == doctest::Approx(hp).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue functions h±") {
  const DiracParams prm;
  FieldConfig free;
  auto [hp0, hm0] = eigenvalues_h(PhasePoint{}, free, prm);
  CHECK(hp0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hm0 == doctest::Approx(-1.0).epsilon(1e-15));

  PhasePoint pt;
  pt.p = Vec3(1, 0, 0);
  auto [hp, hm] = eigenvalues_h(pt, free, prm);
  CHECK(hp == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(hm == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));

  // h+ - e phi = M = -(h- - e phi), and h+ - h- >= 2 m c^2.
  const FieldConfig f = test_fields();
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const PhasePoint q = random_point(rng, 2.0, f.L);
    const auto [a, b] = eigenvalues_h(q, f, prm);
    const double M = order_M(q, f, prm);
    const double ephi = prm.e * f.eval_phi(q.x);
    CHECK(a - ephi == doctest::Approx(M).epsilon(1e-13));
    CHECK(b - ephi == doctest::Approx(-M).epsilon(1e-13));
    CHECK(a - b >= 2.0 * prm.m * prm.c * prm.c - 1e-12);
  }
}

TEST_CASE("projection matrices pi0±") {
  const DiracParams prm;
  const FieldConfig f = test_fields();
  Rng rng(13);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const PhasePoint pt = random_point(rng, 2.0, f.L);
    const auto [pp, pm] = projector_pi0(pt, f, prm);
    CHECK((pp * pp - pp).norm() < 1e-13);
    CHECK((pm * pm - pm).norm() < 1e-13);
    CHECK((pp + pm - Mat4::Identity()).norm() < 1e-14);
    CHECK(pp.trace().real() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK((pp - pp.adjoint()).norm() < 1e-14);

    const Mat4 H = eval_dirac_symbol(pt, f, prm);
    const auto [hp, hm] = eigenvalues_h(pt, f, prm);
    worst = std::max(worst, (H * pp - hp * pp).norm());
    worst = std::max(worst, (H * pm - hm * pm).norm());
    // Spectral decomposition of the symbol.
    CHECK((H - hp * pp - hm * pm).norm() < 1e-10);
  }
  CHECK(worst < 1e-10);

  FieldConfig free;
  const Mat4 ppfree = projector_pi0(PhasePoint{}, free, prm, Branch::plus);
  Mat4 want = Mat4::Zero();
  want(0, 0) = want(1, 1) = 1.0;
  CHECK((ppfree - want).norm() < 1e-15);
}

TEST_CASE("order function and sampled resolvent bound") {
  const DiracParams prm;
  FieldConfig free;
  CHECK(order_M(PhasePoint{}, free, prm) == doctest::Approx(1.0));

  const FieldConfig f = test_fields();
  Rng rng(17);
  double worst_ratio = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PhasePoint pt = random_point(rng, 2.5, f.L);
    const double M = order_M(pt, f, prm);
    const auto [hp, hm] = eigenvalues_h(pt, f, prm);
    CHECK(std::abs(M - 0.5 * (hp - hm)) < 1e-12 * std::max(1.0, M));
    // ||(H_D + i)^-1|| = 1/min_nu |h_nu + i|; the product with M stays bounded.
    const double inv_norm = 1.0 / std::sqrt(std::min(hp * hp, hm * hm) + 1.0);
    worst_ratio = std::max(worst_ratio, inv_norm * M);
  }
  CHECK(worst_ratio < 2.0);
}

TEST_CASE("electromagnetic fields from potentials") {
  DiracParams prm;
  FieldConfig f;
  f.L = 2.0 * pi;
  f.phi = {{{1, 0, 0}, 1.0, pi / 2.0}};  // cos(x1 + pi/2) = -sin(x1)

  // E = -grad phi: phi = -sin(x1) -> E = cos(x1) e1 ... use the spec case:
  FieldConfig g;
  g.L = 2.0 * pi;
  g.phi = {{{1, 0, 0}, 1.0, 0.0}};  // cos(2 pi x1 / L)
  Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    Vec3 x(rng.uniform(0, g.L), rng.uniform(0, g.L), rng.uniform(0, g.L));
    const EBFields eb = fields_EB(g, x);
    const double w = 2.0 * pi / g.L;
    CHECK(eb.E[0] == doctest::Approx(w * std::sin(w * x[0])).epsilon(1e-13));
    CHECK(eb.E[1] == doctest::Approx(0.0));
    CHECK(eb.B.norm() == 0.0);  // A = 0 -> B = 0
  }

  // div B = 0: assemble the divergence from analytic second derivatives of A;
  // the k.(k x a) cancellation is term-by-term exact.
  const FieldConfig h = test_fields();
  for (int i = 0; i < 50; ++i) {
    Vec3 x(rng.uniform(0, h.L), rng.uniform(0, h.L), rng.uniform(0, h.L));
    const double w = 2.0 * pi / h.L;
    auto d2 = [&](const std::vector<FieldMode>& ms, int i1, int i2) {
      double v = 0.0;
      for (const auto& m : ms)
        v += -m.amp * w * w * m.k[i1] * m.k[i2] *
             std::cos(w * m.k.cast<double>().dot(x) + m.phase);
      return v;
    };
    // div B = d1(d2 A3 - d3 A2) + d2(d3 A1 - d1 A3) + d3(d1 A2 - d2 A1)
    const double div = (d2(h.A[2], 0, 1) - d2(h.A[1], 0, 2)) +
                       (d2(h.A[0], 1, 2) - d2(h.A[2], 1, 0)) +
                       (d2(h.A[1], 2, 0) - d2(h.A[0], 2, 1));
    CHECK(std::abs(div) < 1e-12);
  }
}

TEST_CASE("precession vector: field-free and Larmor magnitude") {
  const DiracParams prm;
  FieldConfig free;
  CHECK(precession_C(PhasePoint{}, free, prm, Branch::plus).norm() == 0.0);
  PhasePoint moving;
  moving.p = Vec3(0.4, -0.2, 0.7);
  CHECK(precession_C(moving, free, prm, Branch::plus).norm() == 0.0);

  // Uniform-B approximant: A2 = (B0 L / 2 pi) sin(2 pi x1 / L) gives
  // B = B0 cos(2 pi x1 / L) e3 = B0 e3 at x1 = 0.
  const double B0 = 0.25;
  FieldConfig mag;
  mag.L = 2.0 * pi;
  mag.A[1] = {{{1, 0, 0}, B0 * mag.L / (2.0 * pi), -pi / 2.0}};  // cos(. - pi/2) = sin
  const Vec3 C = precession_C(PhasePoint{}, mag, prm, Branch::plus);
  CHECK(std::abs(C[0]) < 1e-14);
  CHECK(std::abs(C[1]) < 1e-14);
  CHECK(std::abs(std::abs(C[2]) - prm.e * B0 / (prm.m * prm.c)) < 1e-12);
}

TEST_CASE("analytic h gradients match central finite differences") {
  const DiracParams prm;
  const FieldConfig f = test_fields();
  Rng rng(23);
  const double step = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const PhasePoint pt = random_point(rng, 2.0, f.L);
    for (Branch nu : {Branch::plus, Branch::minus}) {
      const HGradient g = grad_h(pt, f, prm, nu);
      for (int k = 0; k < 3; ++k) {
        PhasePoint a = pt, b = pt;
        a.p[k] += step;
        b.p[k] -= step;
        const double fd_p = (eval_h(a, f, prm, nu) - eval_h(b, f, prm, nu)) / (2 * step);
        CHECK(std::abs(fd_p - g.dp[k]) < 1e-6 * std::max(1.0, std::abs(g.dp[k])));
        a = pt;
        b = pt;
        a.x[k] += step;
        b.x[k] -= step;
        const double fd_x = (eval_h(a, f, prm, nu) - eval_h(b, f, prm, nu)) / (2 * step);
        CHECK(std::abs(fd_x - g.dx[k]) < 1e-6 * std::max(1.0, std::abs(g.dx[k])));
      }
    }
  }
}

TEST_CASE("branch isometries") {
  const DiracParams prm;
  const FieldConfig f = test_fields();
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    const PhasePoint pt = random_point(rng, 2.0, f.L);
    const Mat4x2 Vp = isometry_V(pt, f, prm, Branch::plus);
    const Mat4x2 Vm = isometry_V(pt, f, prm, Branch::minus);
    CHECK((Vp.adjoint() * Vp - Mat2::Identity()).norm() < 1e-12);
    CHECK((Vm.adjoint() * Vm - Mat2::Identity()).norm() < 1e-12);
    CHECK((Vp * Vp.adjoint() - projector_pi0(pt, f, prm, Branch::plus)).norm() < 1e-12);
    CHECK((Vm * Vm.adjoint() - projector_pi0(pt, f, prm, Branch::minus)).norm() < 1e-12);
    CHECK((Vp.adjoint() * Vm).norm() < 1e-12);
  }
}

TEST_CASE("field config JSON round trip") {
  const FieldConfig f = test_fields();
  const std::string text = f.to_json();
  const FieldConfig g = FieldConfig::from_json(text);
  CHECK(g.L == f.L);
  REQUIRE(g.phi.size() == f.phi.size());
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    Vec3 x(rng.uniform(0, f.L), rng.uniform(0, f.L), rng.uniform(0, f.L));
    CHECK(g.eval_phi(x) == doctest::Approx(f.eval_phi(x)).epsilon(1e-15));
    CHECK((g.eval_A(x) - f.eval_A(x)).norm() < 1e-15);
  }
}
