#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "diraclab/flow.hpp"
#include "diraclab/rng.hpp"
#include "diraclab/shell.hpp"

using namespace diraclab;

namespace {

FieldConfig multi_mode_fields() {
  FieldConfig f;
  f.L = 2.0 * pi;
  f.phi = {{{1, 0, 0}, 0.12, 0.0}, {{0, 1, 1}, 0.08, 0.4}, {{1, -1, 0}, 0.06, 1.7}};
  f.A[0] = {{{0, 1, 0}, 0.10, 0.0}, {{0, 0, 2}, 0.05, 0.8}};
  f.A[1] = {{{1, 0, 0}, 0.09, -0.5}};
  f.A[2] = {{{1, 1, 0}, 0.07, 0.25}};
  return f;
}

PhasePoint shell_point() {
  PhasePoint pt;
  pt.p = Vec3(0.62, -0.31, 0.45);
  pt.x = Vec3(1.1, 2.3, 4.0);
  return pt;
}

double vector_angle(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

}  // namespace

TEST_CASE("hamiltonian vector field: free forms and finite differences") {
  const DiracParams prm;
  FieldConfig free;

  PhasePoint pt;
  pt.p = Vec3(0.8, -0.3, 0.1);
  const auto v = hamiltonian_vector_field(pt, free, prm, Branch::plus);
  const double M = std::sqrt(pt.p.squaredNorm() + 1.0);
  CHECK((v.xdot - pt.p / M).norm() < 1e-14);
  CHECK(v.pdot.norm() == 0.0);
  const auto vm = hamiltonian_vector_field(pt, free, prm, Branch::minus);
  CHECK((vm.xdot + pt.p / M).norm() < 1e-14);

  CHECK(hamiltonian_vector_field(PhasePoint{}, free, prm, Branch::plus).xdot.norm() == 0.0);

  const FieldConfig f = multi_mode_fields();
  Rng rng(3);
  const double step = 1e-6;
  for (int i = 0; i < 30; ++i) {
    PhasePoint q;
    for (int k = 0; k < 3; ++k) q.p[k] = rng.uniform(-1.5, 1.5);
    for (int k = 0; k < 3; ++k) q.x[k] = rng.uniform(0.0, f.L);
    const auto hv = hamiltonian_vector_field(q, f, prm, Branch::plus);
    for (int k = 0; k < 3; ++k) {
      PhasePoint a = q, b = q;
      a.p[k] += step;
      b.p[k] -= step;
      const double fd = (eval_h(a, f, prm, Branch::plus) - eval_h(b, f, prm, Branch::plus)) /
                        (2 * step);
      CHECK(std::abs(fd - hv.xdot[k]) < 1e-6 * std::max(1.0, std::abs(hv.xdot[k])));
    }
  }
}

TEST_CASE("flow integration: free exactness, drift, reversibility") {
  const DiracParams prm;
  FieldConfig free;
  PhasePoint pt = shell_point();

  const double t = 7.3;
  const auto st = integrate_flow(pt, t, free, prm, Branch::plus);
  const double M = std::sqrt(pt.p.squaredNorm() + 1.0);
  const Vec3 want = wrap_position(pt.x + t * pt.p / M, free.L);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(wrap_delta(st.pt.x[k] - want[k], free.L)) < 1e-9);
  CHECK((st.pt.p - pt.p).norm() < 1e-12);

  const FieldConfig f = multi_mode_fields();
  const auto chaotic = integrate_flow(pt, 100.0, f, prm, Branch::plus);
  CHECK(chaotic.energy_drift < 1e-8);

  // Phi^{-t} o Phi^t = id.
  const auto fwd = integrate_flow(pt, 5.0, f, prm, Branch::plus);
  const auto back = integrate_flow(fwd.pt, -5.0, f, prm, Branch::plus);
  CHECK((back.pt.p - pt.p).norm() < 1e-6);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(wrap_delta(back.pt.x[k] - pt.x[k], f.L)) < 1e-6);
}

TEST_CASE("spin transport: trivial, closed form, invariants") {
  const DiracParams prm;
  FieldConfig free;
  const PhasePoint pt = shell_point();

  // C == 0 -> D = I.
  const auto tr0 = integrate_spin_transport(pt, 4.0, free, prm, Branch::plus);
  CHECK((tr0.D - Mat2::Identity()).norm() < 1e-12);

  // Constant C = (0,0,w0): D(t) = exp(-i w0 t sigma3 / 2).
  const double w0 = 0.9;
  const double t = 3.7;
  const auto tr = integrate_spin_transport(
      pt, t, free, prm, Branch::plus, {}, [&](const PhasePoint&) { return Vec3(0, 0, w0); });
  Mat2 want = Mat2::Zero();
  want(0, 0) = std::exp(-iu * (w0 * t / 2.0));
  want(1, 1) = std::exp(iu * (w0 * t / 2.0));
  CHECK((tr.D - want).norm() < 1e-8);

  // SU(2) invariants along a long run in the multi-mode scenario.
  const FieldConfig f = multi_mode_fields();
  const auto trc = integrate_spin_transport(pt, 100.0, f, prm, Branch::plus);
  CHECK((trc.D.adjoint() * trc.D - Mat2::Identity()).norm() < 1e-8);
  const cplx det = trc.D(0, 0) * trc.D(1, 1) - trc.D(0, 1) * trc.D(1, 0);
  CHECK(std::abs(det - 1.0) < 1e-8);
  CHECK(trc.energy_drift < 1e-8);
}

TEST_CASE("conjugate transport is a partial isometry between branch ranges") {
  const DiracParams prm;
  const FieldConfig f = multi_mode_fields();
  const PhasePoint pt = shell_point();

  const auto tr0 = integrate_spin_transport(pt, 0.0, f, prm, Branch::plus);
  const Mat4 d0 = conjugate_transport(tr0, f, prm);
  CHECK((d0 - projector_pi0(pt, f, prm, Branch::plus)).norm() < 1e-10);

  const auto tr = integrate_spin_transport(pt, 2.5, f, prm, Branch::plus);
  const Mat4 d = conjugate_transport(tr, f, prm);
  CHECK((d.adjoint() * d - projector_pi0(pt, f, prm, Branch::plus)).norm() < 1e-8);
  CHECK((d * d.adjoint() - projector_pi0(tr.end, f, prm, Branch::plus)).norm() < 1e-8);
}

TEST_CASE("spin precession: invariants, Larmor, SU(2) compatibility") {
  const DiracParams prm;
  FieldConfig free;
  const PhasePoint pt = shell_point();
  const Vec3 s0 = Vec3(1, 0, 0);

  CHECK((spin_precession(pt, s0, 6.0, free, prm, Branch::plus) - s0).norm() < 1e-12);

  const double w0 = 1.3, t = 2.2;
  const Vec3 s = spin_precession(pt, s0, t, free, prm, Branch::plus, {},
                                 [&](const PhasePoint&) { return Vec3(0, 0, w0); });
  const Vec3 want(std::cos(w0 * t), std::sin(w0 * t), 0.0);
  CHECK((s - want).norm() < 1e-7);
  CHECK(std::abs(s.norm() - 1.0) < 1e-8);

  // s(t) = R(D(t)) s0 ties the vector ODE to the SU(2) transport.
  const FieldConfig f = multi_mode_fields();
  const Vec3 sa = spin_precession(pt, s0, 8.0, f, prm, Branch::plus);
  const auto tr = integrate_spin_transport(pt, 8.0, f, prm, Branch::plus);
  const Vec3 sb = su2_to_so3(tr.D) * s0;
  CHECK((sa - sb).norm() < 1e-6);
  CHECK(std::abs(sa.norm() - 1.0) < 1e-8);
}

TEST_CASE("double covering map") {
  CHECK((su2_to_so3(Mat2::Identity()) - Mat3::Identity()).norm() < 1e-15);
  CHECK((su2_to_so3(-Mat2::Identity()) - Mat3::Identity()).norm() < 1e-15);

  const double th = 0.77;
  Mat2 g = Mat2::Zero();
  g(0, 0) = std::exp(-iu * th / 2.0);
  g(1, 1) = std::exp(iu * th / 2.0);
  Mat3 want;
  want << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  CHECK((su2_to_so3(g) - want).norm() < 1e-14);

  // Orthogonality, det 1 for a generic unitary.
  Mat2 u = (Mat2() << cplx(0.6, 0.3), cplx(-0.2, 0.7), cplx(0.2, 0.7), cplx(0.6, -0.3)).finished();
  u /= std::sqrt(std::abs(u.determinant()));
  const Mat3 R = su2_to_so3(u);
  CHECK((R * R.transpose() - Mat3::Identity()).norm() < 1e-12);
  CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("skew flow: identity at t=0 and cocycle law") {
  const DiracParams prm;
  const FieldConfig f = multi_mode_fields();
  Rng rng(5);

  SkewStateS2 st;
  st.pt = shell_point();
  st.s = Vec3(0.3, -0.5, 0.81).normalized();

  const auto id = skew_flow(st, 0.0, f, prm, Branch::plus);
  CHECK((id.pt.p - st.pt.p).norm() < 1e-12);
  CHECK((id.s - st.s).norm() < 1e-12);

  const double t = 1.7, s = 2.4;
  const auto one = skew_flow(st, t + s, f, prm, Branch::plus);
  const auto two = skew_flow(skew_flow(st, s, f, prm, Branch::plus), t, f, prm, Branch::plus);
  CHECK((one.pt.p - two.pt.p).norm() < 1e-6);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(wrap_delta(one.pt.x[k] - two.pt.x[k], f.L)) < 1e-6);
  CHECK((one.s - two.s).norm() < 1e-6);

  // SU(2) cocycle.
  SkewStateSU2 sg;
  sg.pt = st.pt;
  sg.g = Mat2::Identity();
  const auto g1 = skew_flow(sg, t + s, f, prm, Branch::plus);
  const auto g2 = skew_flow(skew_flow(sg, s, f, prm, Branch::plus), t, f, prm, Branch::plus);
  CHECK((g1.g - g2.g).norm() < 1e-6);
}

TEST_CASE("shell sampling: membership, free-case geometry, scaling") {
  const DiracParams prm;
  FieldConfig free;
  ShellOptions opts;
  opts.momentum_halfwidth = pi;

  const double E = 1.2;
  const double eta = 1.2e-3;
  const auto sample = sample_shell(E, Branch::plus, 4000, eta, 42, free, prm, opts);
  REQUIRE(sample.points.size() == 4000);
  const double pE = std::sqrt(E * E - 1.0);
  for (std::size_t i = 0; i < sample.points.size(); i += 37) {
    const auto& pt = sample.points[i];
    CHECK(std::abs(eval_h(pt, free, prm, Branch::plus) - E) <= eta);
    CHECK(std::abs(pt.p.norm() - pE) < 5e-3);  // |p| concentrates at p_E
    CHECK(sample.weights[i] > 0.0);
  }

  // chi^2 uniformity of x1 over 8 bins at the 99.9% level (chi2_7 = 24.32).
  constexpr int bins = 8;
  int count[bins] = {0};
  for (const auto& pt : sample.points)
    ++count[std::min(bins - 1, static_cast<int>(pt.x[0] / free.L * bins))];
  const double expect = static_cast<double>(sample.points.size()) / bins;
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) chi2 += (count[b] - expect) * (count[b] - expect) / expect;
  CHECK(chi2 < 24.32);

  // Same seed -> bit-identical sample.
  const auto again = sample_shell(E, Branch::plus, 4000, eta, 42, free, prm, opts);
  REQUIRE(again.points.size() == sample.points.size());
  for (std::size_t i = 0; i < again.points.size(); i += 101) {
    CHECK(again.points[i].p == sample.points[i].p);
    CHECK(again.points[i].x == sample.points[i].x);
  }

  // Standard error of the volume estimate scales like 1/sqrt(n).
  const auto v3 = shell_volume(E, Branch::plus, free, prm, 10000, 7, 0.05, opts);
  const auto v4 = shell_volume(E, Branch::plus, free, prm, 100000, 7, 0.05, opts);
  const auto v5 = shell_volume(E, Branch::plus, free, prm, 1000000, 7, 0.05, opts);
  CHECK(v4.std_error < v3.std_error);
  CHECK(v5.std_error < v4.std_error);
  CHECK(v5.std_error == doctest::Approx(v4.std_error / std::sqrt(10.0)).epsilon(0.35));
}

TEST_CASE("shell volume: analytic free value, emptiness, monotonicity") {
  const DiracParams prm;
  FieldConfig free;
  ShellOptions opts;
  opts.momentum_halfwidth = pi;

  const double E = 1.2;
  const auto est = shell_volume(E, Branch::plus, free, prm, 6'000'000, 11, 8e-3, opts);
  const double analytic = free_shell_volume(E, free.L, prm);
  CHECK(std::abs(est.value - analytic) < 3.0 * est.std_error);
  CHECK(est.std_error / est.value < 0.02);

  // Below the mass gap (weak fields), the + shell is empty.
  FieldConfig weak;
  weak.phi = {{{1, 0, 0}, 0.05, 0.0}};
  CHECK_THROWS_AS(
      sample_shell(0.5, Branch::plus, 10, 1e-3, 1, weak, prm, opts), EmptyShell);
  const auto zero = shell_volume(0.5, Branch::plus, weak, prm, 200000, 1, 1e-3, opts);
  CHECK(zero.value == 0.0);

  const auto a = shell_volume(1.1, Branch::plus, free, prm, 500000, 13, 1e-3, opts);
  const auto b = shell_volume(1.4, Branch::plus, free, prm, 500000, 13, 1e-3, opts);
  const auto c = shell_volume(1.8, Branch::plus, free, prm, 500000, 13, 1e-3, opts);
  CHECK(a.value < b.value);
  CHECK(b.value < c.value);
}

TEST_CASE("liouville averages: projector traces and scalar factors") {
  const DiracParams prm;
  const FieldConfig f = multi_mode_fields();
  ShellOptions opts;
  opts.momentum_halfwidth = pi;
  const double E = 1.25;
  const auto sample = sample_shell(E, Branch::plus, 20000, E * 1e-3, 99, f, prm, opts);

  // B = I4: average of tr pi0 = 2 exactly.
  const auto unit = liouville_average_symbol([](const PhasePoint&) { return Mat4::Identity(); },
                                             sample, f, prm);
  CHECK(unit.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(unit.std_error < 1e-12);

  // B = g(p,x) I4: sandwich trace = 2 g.
  auto g = [&](const PhasePoint& pt) { return std::cos(2.0 * pi * pt.x[0] / f.L) + 0.2 * pt.p[1]; };
  const auto lhs = liouville_average_symbol(
      [&](const PhasePoint& pt) { return Mat4(g(pt) * Mat4::Identity()); }, sample, f, prm);
  const auto rhs = liouville_average([&](const PhasePoint& pt) { return g(pt); }, sample);
  CHECK(lhs.value == doctest::Approx(2.0 * rhs.value).epsilon(1e-10));
}

TEST_CASE("skew flow leaves the product measure invariant (MC check)") {
  const DiracParams prm;
  const FieldConfig f = multi_mode_fields();
  ShellOptions opts;
  opts.momentum_halfwidth = pi;
  const double E = 1.25;
  const auto sample = sample_shell(E, Branch::plus, 360, E * 1e-3, 1234, f, prm, opts);

  Rng rng(77);
  auto obs = [&](const PhasePoint& pt, const Vec3& s) {
    return std::cos(2.0 * pi * pt.x[1] / f.L) * (1.0 + 0.5 * s[2]) + 0.3 * std::sin(pt.p[0]);
  };
  double before = 0.0, after = 0.0, var = 0.0;
  std::vector<double> vals;
  for (const auto& pt : sample.points) {
    // Uniform spin on S^2.
    const double u = rng.uniform(-1.0, 1.0), ph = rng.uniform(0.0, 2.0 * pi);
    SkewStateS2 st;
    st.pt = pt;
    st.s = Vec3(std::sqrt(1 - u * u) * std::cos(ph), std::sqrt(1 - u * u) * std::sin(ph), u);
    const double v0 = obs(st.pt, st.s);
    const auto moved = skew_flow(st, 0.8, f, prm, Branch::plus);
    before += v0;
    after += obs(moved.pt, moved.s);
    vals.push_back(v0);
  }
  const double n = static_cast<double>(sample.points.size());
  before /= n;
  after /= n;
  for (double v : vals) var += (v - before) * (v - before);
  const double se = std::sqrt(var / (n - 1) / n);
  CHECK(std::abs(after - before) < 4.0 * se + 1e-3);
}

TEST_CASE("birkhoff averages: constants and integrable spread") {
  const DiracParams prm;
  FieldConfig free;
  SkewStateS2 st;
  st.pt = shell_point();
  st.s = Vec3::UnitZ();

  const double cavg =
      birkhoff_average([](const PhasePoint&, const Vec3&) { return 0.7; }, st, 50.0, free, prm,
                       Branch::plus);
  CHECK(cavg == doctest::Approx(0.7).epsilon(1e-10));

  // Free motion is integrable: time averages depend on the initial condition.
  auto obs = [&](const PhasePoint& pt, const Vec3&) { return std::abs(pt.p[0]); };
  SkewStateS2 st2 = st;
  st2.pt.p = Vec3(0.1, 0.75, -0.2);
  const double a = birkhoff_average(obs, st, 200.0, free, prm, Branch::plus);
  const double b = birkhoff_average(obs, st2, 200.0, free, prm, Branch::plus);
  CHECK(std::abs(a - b) > 0.1);
}
