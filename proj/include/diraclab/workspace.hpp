#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "diraclab/cache.hpp"
#include "diraclab/scenario.hpp"
#include "diraclab/shell.hpp"
#include "diraclab/spectral.hpp"

namespace diraclab {

/// Lazily computed per-(scenario, N) artifacts, shared across diagnostics.
/// Dense matrices at the finest grids dominate memory, so the Hamiltonian,
/// projectors and the decomposition have explicit release hooks; the
/// acceptance runner and the CLI sweep one N at a time and release before
/// moving on. Eigendecompositions are disk-cached when a cache dir is set.
class Workspace {
 public:
  explicit Workspace(ScenarioConfig cfg, std::string cache_dir = "");

  const ScenarioConfig& config() const { return cfg_; }

  const GridOperator& hamiltonian(int N);
  const BuildInfo& hamiltonian_info(int N);
  const EigenDecomp& decomp(int N);
  bool decomp_was_cached(int N);  // true if the last decomp(N) hit the disk cache
  const GridOperator& almost(int N, Branch nu);
  const GridOperator& riesz(int N, Branch nu);
  const RieszInfo& riesz_info(int N, Branch nu);
  const EigenWindow& window(int N);
  const QuasimodeSet& quasimode_set(int N, Branch nu);

  GridOperator quantize_observable(int N, const ObservableSpec& obs);

  /// Everything the window diagnostics need from one quantized observable,
  /// computed with a single quantization pass and cached as scalars.
  struct ObsStats {
    VecXd window_expectations;     // <psi_n, B psi_n> over the window
    VecXd quasimode_expectations;  // <phi_i, B phi_i> over retained quasimodes
    double eig_variant_dev = 0.0;  // max |<psi,PBP psi>/||P psi||^2 - <phi,B phi>|
  };
  const ObsStats& observable_stats(int N, const ObservableSpec& obs);

  /// <psi_n, B psi_n> over the window, cached per (N, observable).
  const VecXd& window_expectations(int N, const ObservableSpec& obs);

  /// Liouville shell machinery (N-independent), cached per branch.
  const ShellSample& shell(Branch nu);           // EmptyShell if empty
  McEstimate shell_vol(Branch nu);               // {0,0} if empty
  /// Liouville average of tr(pi0 B0 pi0) over the branch shell.
  McEstimate classical_trace_average(const ObservableSpec& obs, Branch nu);

  void release_hamiltonian(int N);
  void release_almost(int N);
  void release_projectors(int N);
  void release_decomp(int N);
  void release(int N);  // everything big for this N

 private:
  struct PerN {
    std::optional<GridOperator> H;
    BuildInfo info;
    bool info_valid = false;
    std::optional<EigenDecomp> ed;
    bool ed_from_cache = false;
    std::map<int, GridOperator> almost_by_branch;  // key: sign
    std::map<int, GridOperator> riesz_by_branch;
    std::map<int, RieszInfo> riesz_info_by_branch;
    std::optional<EigenWindow> win;
    std::map<int, QuasimodeSet> quasimodes_by_branch;
    std::map<std::string, ObsStats> obs_stats;
  };

  PerN& slot(int N) { return per_n_[N]; }

  ScenarioConfig cfg_;
  std::optional<EigenCache> cache_;
  std::map<int, PerN> per_n_;
  std::map<int, ShellSample> shells_;          // key: branch sign; absent if empty
  std::map<int, bool> shell_empty_;
  std::map<int, McEstimate> volumes_;
  std::map<std::string, McEstimate> averages_;  // key: obs|branch
};

}  // namespace diraclab
