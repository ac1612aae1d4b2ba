#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "diraclab/fields.hpp"
#include "diraclab/grid.hpp"
#include "diraclab/symbols.hpp"

namespace diraclab {

struct ToleranceTable {
  double energy_drift = 1e-8;
  double su2_residual = 1e-8;
  double spin_compat = 1e-6;
  double cocycle = 1e-6;
  double quantize_tail = 0.25;
  double slope_min = 0.8;  // expected O(hbar) trends
};

/// A named observable for the window-average and ergodicity diagnostics.
struct ObservableSpec {
  std::string name;
  std::shared_ptr<const PhaseSpaceSymbol> symbol;
};

/// Everything a run needs: fields, particle constants, the grid family, the
/// spectral window, Monte-Carlo budgets and tolerances. Presets FREE,
/// WEAK_SCALAR, MAGNETIC and CHAOTIC ship with the repository and drive the
/// acceptance suite.
struct ScenarioConfig {
  std::string tag = "FREE";
  FieldConfig fields;
  DiracParams params;
  double P = pi;                       // momentum half-width of the box
  std::vector<int> N_list = {6, 8, 10, 12};
  double E = 1.2;                      // window center
  double omega = 1.0;                  // window half-width multiplier
  double delta = 0.1;                  // quasimode retention threshold
  double tau = 0.05;                   // QE closeness tolerance
  double eta_rel = 1e-3;               // slab half-width / E
  double egorov_time = 1.0;
  int egorov_samples = 256;
  Branch branch = Branch::plus;
  std::uint64_t seed = 1;
  std::uint64_t volume_samples = 30'000'000;  // proposals for shell volumes
  std::uint64_t average_samples = 20'000;     // accepted points for averages
  double window_valid_lo = -1e300;     // scenario-declared validity range for E
  double window_valid_hi = 1e300;
  ToleranceTable tol;

  GridSpec grid(int N) const { return GridSpec{N, fields.L, P}; }
  double eta() const { return eta_rel * std::abs(E); }

  /// Maximum kinetic momentum on the shell h_nu = E (closed form), used by
  /// the shell-inside-cutoff validation; negative if the shell is empty.
  double shell_momentum_radius(Branch nu) const;
  bool shell_nonempty(Branch nu) const { return shell_momentum_radius(nu) > 0.0; }

  /// ConfigInvalid on any violated invariant (N-list shape, band limits,
  /// shell-inside-cutoff at 0.6 P, positive tolerances).
  void validate() const;

  /// Hash of the subset that determines the Hamiltonian (fields, params,
  /// L, P, N) — the eigendecomposition cache key.
  std::uint64_t hamiltonian_key(int N) const;

  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig load_file(const std::string& path);
  static ScenarioConfig preset(const std::string& tag);

  /// The fixed observable set used by the Szego and QE diagnostics:
  /// scalar cos(2 pi x1/L) I4, momentum |p|^2 I4, spin Sigma3.
  std::vector<ObservableSpec> observables() const;
};

}  // namespace diraclab
