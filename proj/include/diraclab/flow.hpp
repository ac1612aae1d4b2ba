#pragma once

#include <functional>

#include "diraclab/common.hpp"
#include "diraclab/dirac.hpp"
#include "diraclab/errors.hpp"
#include "diraclab/fields.hpp"

namespace diraclab {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-2;
  /// StepFailure once the step shrinks below this fraction of the interval.
  double min_step_fraction = 1e-14;
};

struct TrajectoryState {
  PhasePoint pt;
  double t = 0.0;
  Branch nu = Branch::plus;
  double energy0 = 0.0;     // h_nu at the initial point
  double energy_drift = 0.0; // max |h_nu - energy0| seen along the run
};

/// Hamilton's equations for h_nu: xdot = dh/dp = nu c^2 pi/M, pdot = -dh/dx.
struct PhaseVelocity {
  Vec3 xdot, pdot;
};
PhaseVelocity hamiltonian_vector_field(const PhasePoint& pt, const FieldConfig& f,
                                       const DiracParams& prm, Branch nu);

/// Integrate the Hamiltonian flow Phi^t_nu (Dormand-Prince 5(4), adaptive).
/// Positions are reduced mod L on output; t may be negative.
TrajectoryState integrate_flow(const PhasePoint& pt0, double t, const FieldConfig& f,
                               const DiracParams& prm, Branch nu,
                               const OdeOptions& opts = {});

/// Precession vector field along the flow; overridable for closed-form tests
/// and for the spin-off control experiment.
using PrecessionFn = std::function<Vec3(const PhasePoint&)>;

struct SpinTransport {
  Mat2 D = Mat2::Identity();   // SU(2) transport matrix
  PhasePoint start, end;       // end = Phi^t(start)
  double t = 0.0;
  Branch nu = Branch::plus;
  double energy_drift = 0.0;
};

/// Solve Ddot + (i/2) C_nu(Phi^t) . sigma D = 0, D(0) = I2, co-integrated with
/// the flow and renormalized into SU(2) after every accepted step.
SpinTransport integrate_spin_transport(const PhasePoint& pt0, double t, const FieldConfig& f,
                                       const DiracParams& prm, Branch nu,
                                       const OdeOptions& opts = {},
                                       const PrecessionFn& C_override = nullptr);

/// Partial isometry V_nu(Phi^t(pt)) D V_nu^*(pt) in 4x4 form. Only the
/// sandwich between the branch projectors is ever consumed downstream, so no
/// extension off the branch range is constructed.
Mat4 conjugate_transport(const SpinTransport& tr, const FieldConfig& f, const DiracParams& prm);

/// Integrate sdot = C_nu(Phi^t) x s together with the flow.
Vec3 spin_precession(const PhasePoint& pt0, const Vec3& s0, double t, const FieldConfig& f,
                     const DiracParams& prm, Branch nu, const OdeOptions& opts = {},
                     const PrecessionFn& C_override = nullptr);

/// Double covering map, R(g)_kl = (1/2) tr(sigma_k g sigma_l g*).
Mat3 su2_to_so3(const Mat2& g);

/// Skew product state on Omega x S^2 (unit spin) or Omega x SU(2).
struct SkewStateS2 {
  PhasePoint pt;
  Vec3 s = Vec3::UnitZ();
};
struct SkewStateSU2 {
  PhasePoint pt;
  Mat2 g = Mat2::Identity();
};

/// Y^t(p,x,s) = (Phi^t(p,x), R(D(t)) s).
SkewStateS2 skew_flow(const SkewStateS2& st, double t, const FieldConfig& f,
                      const DiracParams& prm, Branch nu, const OdeOptions& opts = {});
/// Ytilde^t(p,x,g) = (Phi^t(p,x), D(t) g).
SkewStateSU2 skew_flow(const SkewStateSU2& st, double t, const FieldConfig& f,
                       const DiracParams& prm, Branch nu, const OdeOptions& opts = {});

/// Time average (1/T) int_0^T obs(Y^t(state)) dt, accumulated by quadrature
/// inside the adaptive integration (the accumulator is one more ODE state).
using SkewObservable = std::function<double(const PhasePoint&, const Vec3& s)>;
double birkhoff_average(const SkewObservable& obs, const SkewStateS2& st0, double T,
                        const FieldConfig& f, const DiracParams& prm, Branch nu,
                        const OdeOptions& opts = {});

}  // namespace diraclab
