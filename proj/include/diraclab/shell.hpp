#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "diraclab/common.hpp"
#include "diraclab/dirac.hpp"
#include "diraclab/fields.hpp"

namespace diraclab {

/// Monte-Carlo sample of the energy shell h_nu = E, drawn by thin-slab
/// rejection: proposals uniform in [-P,P)^3 x [0,L)^3, accepted when
/// |h_nu - E| <= eta. Uniform sampling of the slab already realizes Liouville
/// measure on the shell up to O(eta^2) (coarea: d p d x = dE dsigma/|grad h|),
/// so shell averages below are plain means; the per-point coarea densities
/// 1/|grad h| are recorded alongside.
struct ShellSample {
  std::vector<PhasePoint> points;
  std::vector<double> weights;  // 1/|grad h_nu| at each point
  double E = 0.0;
  Branch nu = Branch::plus;
  double eta = 0.0;
  double acceptance = 0.0;  // accepted / proposed
  std::uint64_t proposals = 0;
};

struct ShellOptions {
  double momentum_halfwidth = 0.0;  // P; must be set
  std::uint64_t max_proposals = 100'000'000;
  /// Declare EmptyShell after this many proposals without any acceptance.
  std::uint64_t empty_budget = 2'000'000;
};

ShellSample sample_shell(double E, Branch nu, std::size_t n, double eta, std::uint64_t seed,
                         const FieldConfig& f, const DiracParams& prm, const ShellOptions& opts);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// vol Omega_E^nu = int delta(h_nu - E) dp dx, estimated as
/// box_volume * acceptance / (2 eta). Returns {0, 0} for an empty shell.
McEstimate shell_volume(double E, Branch nu, const FieldConfig& f, const DiracParams& prm,
                        std::size_t n, std::uint64_t seed, double eta, const ShellOptions& opts);

/// Liouville average of a scalar phase-space function over Omega_E^nu.
McEstimate liouville_average(const std::function<double(const PhasePoint&)>& fn,
                             const ShellSample& sample);

/// Normalized shell average of tr(pi0^nu B0 pi0^nu) for a matrix symbol B0.
McEstimate liouville_average_symbol(const std::function<Mat4(const PhasePoint&)>& symbol,
                                    const ShellSample& sample, const FieldConfig& f,
                                    const DiracParams& prm);

/// Free-particle closed form: vol = 4 pi L^3 p_E E / c^2 with
/// p_E = sqrt(E^2 - m^2 c^4)/c (positive branch; empty below the mass gap).
double free_shell_volume(double E, double L, const DiracParams& prm);

}  // namespace diraclab
