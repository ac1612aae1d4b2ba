#pragma once

#include "diraclab/report.hpp"
#include "diraclab/workspace.hpp"

namespace diraclab {

/// Each diagnostic splits into an N-independent context, a per-N row and a
/// finalizer, so a combined runner (the acceptance suite) can sweep one grid
/// at a time, share the expensive per-N artifacts across diagnostics, and
/// release them before the next N. The plain *_check entry points below do
/// exactly that loop for a single diagnostic.

// --- eigenvalue counting vs phase-space volume -----------------------------
struct WeylLawContext {
  McEstimate vol_plus, vol_minus;
};
WeylLawContext weyl_law_context(Workspace& ws);
SweepRow weyl_law_row(Workspace& ws, int N, const WeylLawContext& ctx);
void weyl_law_finalize(SweepReport& rep, const WeylLawContext& ctx);
SweepReport weyl_law_check(Workspace& ws);

// --- window averages vs weighted Liouville averages ------------------------
struct SzegoContext {
  std::vector<ObservableSpec> observables;  // presets + off-diagonal witness
  std::map<std::string, McEstimate> rhs;    // weighted classical prediction
};
SzegoContext szego_context(Workspace& ws);
SweepRow szego_row(Workspace& ws, int N, const SzegoContext& ctx);
void szego_finalize(SweepReport& rep, const SzegoContext& ctx, const ScenarioConfig& cfg);
SweepReport szego_check(Workspace& ws);

// --- projector family trends ------------------------------------------------
SweepRow projector_row(Workspace& ws, int N);
void projector_finalize(SweepReport& rep, const ScenarioConfig& cfg);
SweepReport projector_check(Workspace& ws);

// --- Heisenberg evolution vs classical transport ----------------------------
struct EgorovResult {
  double max_dev = 0.0;
  double mean_dev = 0.0;
  double max_dev_spin_off = 0.0;
  double floor_t0 = 0.0;
  int samples = 0;
};
EgorovResult egorov_error(Workspace& ws, int N, const ObservableSpec& obs, double t,
                          std::uint64_t seed);
SweepRow egorov_row(Workspace& ws, int N);
void egorov_finalize(SweepReport& rep, const ScenarioConfig& cfg);
SweepReport egorov_check(Workspace& ws);

// --- off-diagonal breakdown metric ------------------------------------------
SweepRow offdiag_row(Workspace& ws, int N);
void offdiag_finalize(SweepReport& rep, const ScenarioConfig& cfg);
SweepReport offdiag_check(Workspace& ws);

// --- quasimode expectation statistics ----------------------------------------
struct QeContext {
  std::vector<ObservableSpec> observables;
  std::map<std::string, double> reference;  // (1/2) tr-shell-average
  bool single_shell = false;
};
QeContext qe_context(Workspace& ws);
SweepRow qe_row(Workspace& ws, int N, const QeContext& ctx);
void qe_finalize(SweepReport& rep, const QeContext& ctx, const ScenarioConfig& cfg);
SweepReport qe_check(Workspace& ws);

// --- phase-space pairings of quasimodes --------------------------------------
SweepRow wigner_row(Workspace& ws, int N);
void wigner_finalize(SweepReport& rep);
SweepReport wigner_limit_check(Workspace& ws);

// --- classical integrator / empirical ergodicity (no grid sweep) -------------
SweepReport classical_check(Workspace& ws);

}  // namespace diraclab
