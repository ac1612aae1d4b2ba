#include "diraclab/flow.hpp"

#include <cmath>

namespace diraclab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// 4th-order weights (the b-hat row, with the FSAL 7th stage).
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;

using StateVec = Eigen::VectorXd;
using Rhs = std::function<void(double t, const StateVec&, StateVec&)>;

/// Integrate y' = rhs(t, y) from 0 to t_end (either sign). `on_accept` runs
/// after every accepted step and may project the state back onto a manifold.
void integrate_dp45(const Rhs& rhs, StateVec& y, double t_end, const OdeOptions& opts,
                    const std::function<void(double, StateVec&)>& on_accept = nullptr) {
  if (t_end == 0.0) return;
  if (!std::isfinite(t_end)) throw StepFailure("non-finite integration time");
  const double dir = t_end > 0 ? 1.0 : -1.0;
  const double t_abs = std::abs(t_end);
  const int n = static_cast<int>(y.size());

  StateVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  double t = 0.0;
  double h = dir * std::min(opts.initial_step, t_abs);
  const double h_min = t_abs * opts.min_step_fraction;

  rhs(t, y, k1);
  int consecutive_rejects = 0;
  bool done = false;
  while (!done) {
    bool last = false;
    if (std::abs(h) >= std::abs(t_end - t)) {
      h = t_end - t;
      last = true;
    }
    if (std::abs(h) < h_min || consecutive_rejects > 64)
      throw StepFailure("adaptive step underflow");

    ytmp = y + h * A21 * k1;
    rhs(t + h / 5, ytmp, k2);
    ytmp = y + h * (A31 * k1 + A32 * k2);
    rhs(t + 3 * h / 10, ytmp, k3);
    ytmp = y + h * (A41 * k1 + A42 * k2 + A43 * k3);
    rhs(t + 4 * h / 5, ytmp, k4);
    ytmp = y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
    rhs(t + 8 * h / 9, ytmp, k5);
    ytmp = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    rhs(t + h, ynew, k7);

    // Scaled error estimate of the embedded 4th-order solution.
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = h * ((B1 - E1) * k1[i] + (B3 - E3) * k3[i] + (B4 - E4) * k4[i] +
                            (B5 - E5) * k5[i] + (B6 - E6) * k6[i] - E7 * k7[i]);
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }

    if (err <= 1.0) {
      t = last ? t_end : t + h;
      done = last;
      y = ynew;
      k1 = k7;  // FSAL
      if (on_accept) {
        on_accept(t, y);
        rhs(t, y, k1);  // state may have been projected
      }
      consecutive_rejects = 0;
      const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, grow));
    } else {
      ++consecutive_rejects;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
}

void pack_phase(const PhasePoint& pt, StateVec& y, int off) {
  y.segment<3>(off) = pt.p;
  y.segment<3>(off + 3) = pt.x;
}

PhasePoint unpack_phase(const StateVec& y, int off) {
  PhasePoint pt;
  pt.p = y.segment<3>(off);
  pt.x = y.segment<3>(off + 3);
  return pt;
}

/// Common RHS: phase flow in slots [0..6), optional extras handled by caller.
void phase_rhs(const StateVec& y, StateVec& dy, const FieldConfig& f, const DiracParams& prm,
               Branch nu) {
  const PhasePoint pt = unpack_phase(y, 0);
  const HGradient g = grad_h(pt, f, prm, nu);
  dy.segment<3>(0) = -g.dx;
  dy.segment<3>(3) = g.dp;
}

Mat2 project_su2(const Mat2& D) {
  Eigen::JacobiSVD<Mat2> svd(D, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat2 U = svd.matrixU() * svd.matrixV().adjoint();
  const cplx det = U(0, 0) * U(1, 1) - U(0, 1) * U(1, 0);
  return U * std::exp(-0.5 * iu * std::arg(det));
}

}  // namespace

PhaseVelocity hamiltonian_vector_field(const PhasePoint& pt, const FieldConfig& f,
                                       const DiracParams& prm, Branch nu) {
  const HGradient g = grad_h(pt, f, prm, nu);
  return {g.dp, -g.dx};
}

TrajectoryState integrate_flow(const PhasePoint& pt0, double t, const FieldConfig& f,
                               const DiracParams& prm, Branch nu, const OdeOptions& opts) {
  TrajectoryState st;
  st.nu = nu;
  st.energy0 = eval_h(pt0, f, prm, nu);

  StateVec y(6);
  pack_phase(pt0, y, 0);
  double drift = 0.0;
  integrate_dp45(
      [&](double, const StateVec& yy, StateVec& dy) { phase_rhs(yy, dy, f, prm, nu); }, y, t,
      opts, [&](double, StateVec& yy) {
        yy.segment<3>(3) = wrap_position(yy.segment<3>(3), f.L);
        drift = std::max(drift, std::abs(eval_h(unpack_phase(yy, 0), f, prm, nu) - st.energy0));
      });
  st.pt = unpack_phase(y, 0);
  st.pt.x = wrap_position(st.pt.x, f.L);
  st.t = t;
  st.energy_drift = drift;
  return st;
}

SpinTransport integrate_spin_transport(const PhasePoint& pt0, double t, const FieldConfig& f,
                                       const DiracParams& prm, Branch nu, const OdeOptions& opts,
                                       const PrecessionFn& C_override) {
  SpinTransport tr;
  tr.start = pt0;
  tr.t = t;
  tr.nu = nu;
  const double E0 = eval_h(pt0, f, prm, nu);

  // State: (p, x, Re D, Im D) with D row-major.
  StateVec y(14);
  pack_phase(pt0, y, 0);
  y.segment(6, 8).setZero();
  y[6] = 1.0;   // Re D00
  y[12] = 1.0;  // Re D11

  auto unpack_D = [](const StateVec& yy) {
    Mat2 D;
    D << cplx(yy[6], yy[7]), cplx(yy[8], yy[9]), cplx(yy[10], yy[11]), cplx(yy[12], yy[13]);
    return D;
  };

  double drift = 0.0;
  integrate_dp45(
      [&](double, const StateVec& yy, StateVec& dy) {
        phase_rhs(yy, dy, f, prm, nu);
        const PhasePoint pt = unpack_phase(yy, 0);
        const Vec3 C = C_override ? C_override(pt) : precession_C(pt, f, prm, nu);
        const Mat2 gen = -0.5 * iu * (C[0] * pauli(0) + C[1] * pauli(1) + C[2] * pauli(2));
        const Mat2 Ddot = gen * unpack_D(yy);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            dy[6 + 4 * r + 2 * c] = Ddot(r, c).real();
            dy[6 + 4 * r + 2 * c + 1] = Ddot(r, c).imag();
          }
      },
      y, t, opts,
      [&](double, StateVec& yy) {
        yy.segment<3>(3) = wrap_position(yy.segment<3>(3), f.L);
        drift = std::max(drift, std::abs(eval_h(unpack_phase(yy, 0), f, prm, nu) - E0));
        const Mat2 D = project_su2(unpack_D(yy));
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            yy[6 + 4 * r + 2 * c] = D(r, c).real();
            yy[6 + 4 * r + 2 * c + 1] = D(r, c).imag();
          }
      });

  tr.end = unpack_phase(y, 0);
  tr.end.x = wrap_position(tr.end.x, f.L);
  tr.D = unpack_D(y);
  tr.energy_drift = drift;
  return tr;
}

Mat4 conjugate_transport(const SpinTransport& tr, const FieldConfig& f, const DiracParams& prm) {
  const Mat4x2 V0 = isometry_V(tr.start, f, prm, tr.nu);
  const Mat4x2 V1 = isometry_V(tr.end, f, prm, tr.nu);
  return V1 * tr.D * V0.adjoint();
}

Vec3 spin_precession(const PhasePoint& pt0, const Vec3& s0, double t, const FieldConfig& f,
                     const DiracParams& prm, Branch nu, const OdeOptions& opts,
                     const PrecessionFn& C_override) {
  StateVec y(9);
  pack_phase(pt0, y, 0);
  y.segment<3>(6) = s0;
  integrate_dp45(
      [&](double, const StateVec& yy, StateVec& dy) {
        phase_rhs(yy, dy, f, prm, nu);
        const PhasePoint pt = unpack_phase(yy, 0);
        const Vec3 C = C_override ? C_override(pt) : precession_C(pt, f, prm, nu);
        dy.segment<3>(6) = C.cross(Vec3(yy.segment<3>(6)));
      },
      y, t, opts,
      [&](double, StateVec& yy) {
        yy.segment<3>(3) = wrap_position(yy.segment<3>(3), f.L);
        yy.segment<3>(6).normalize();
      });
  return y.segment<3>(6);
}

Mat3 su2_to_so3(const Mat2& g) {
  Mat3 R;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      R(k, l) = 0.5 * (pauli(k) * g * pauli(l) * g.adjoint()).trace().real();
  return R;
}

SkewStateS2 skew_flow(const SkewStateS2& st, double t, const FieldConfig& f,
                      const DiracParams& prm, Branch nu, const OdeOptions& opts) {
  SkewStateS2 out;
  const SpinTransport tr = integrate_spin_transport(st.pt, t, f, prm, nu, opts);
  out.pt = tr.end;
  out.s = su2_to_so3(tr.D) * st.s;
  return out;
}

SkewStateSU2 skew_flow(const SkewStateSU2& st, double t, const FieldConfig& f,
                       const DiracParams& prm, Branch nu, const OdeOptions& opts) {
  SkewStateSU2 out;
  const SpinTransport tr = integrate_spin_transport(st.pt, t, f, prm, nu, opts);
  out.pt = tr.end;
  out.g = tr.D * st.g;
  return out;
}

double birkhoff_average(const SkewObservable& obs, const SkewStateS2& st0, double T,
                        const FieldConfig& f, const DiracParams& prm, Branch nu,
                        const OdeOptions& opts) {
  if (T <= 0.0) throw StepFailure("birkhoff_average needs T > 0");
  StateVec y(10);
  pack_phase(st0.pt, y, 0);
  y.segment<3>(6) = st0.s;
  y[9] = 0.0;  // running integral of the observable
  integrate_dp45(
      [&](double, const StateVec& yy, StateVec& dy) {
        phase_rhs(yy, dy, f, prm, nu);
        const PhasePoint pt = unpack_phase(yy, 0);
        const Vec3 C = precession_C(pt, f, prm, nu);
        dy.segment<3>(6) = C.cross(Vec3(yy.segment<3>(6)));
        dy[9] = obs(pt, yy.segment<3>(6));
      },
      y, T, opts,
      [&](double, StateVec& yy) {
        yy.segment<3>(3) = wrap_position(yy.segment<3>(3), f.L);
        yy.segment<3>(6).normalize();
      });
  return y[9] / T;
}

}  // namespace diraclab
