#include "diraclab/workspace.hpp"

#include "diraclab/rng.hpp"

namespace diraclab {

Workspace::Workspace(ScenarioConfig cfg, std::string cache_dir) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (!cache_dir.empty()) cache_.emplace(cache_dir);
}

const GridOperator& Workspace::hamiltonian(int N) {
  auto& s = slot(N);
  if (!s.H) {
    QuantizeOptions qo;
    qo.tail_threshold = cfg_.tol.quantize_tail;
    s.H = build_hamiltonian(cfg_.fields, cfg_.params, cfg_.grid(N), qo, &s.info);
    s.info_valid = true;
  }
  return *s.H;
}

const BuildInfo& Workspace::hamiltonian_info(int N) {
  if (!slot(N).info_valid) hamiltonian(N);
  return slot(N).info;
}

const EigenDecomp& Workspace::decomp(int N) {
  auto& s = slot(N);
  if (!s.ed) {
    const std::uint64_t key = cfg_.hamiltonian_key(N);
    if (cache_) {
      if (auto hit = cache_->load(key, cfg_.grid(N))) {
        s.ed = std::move(*hit);
        s.ed_from_cache = true;
        return *s.ed;
      }
    }
    if (s.H) {
      s.ed = eigensolve(*s.H);
    } else {
      // Build privately and let the solver steal the matrix: the dense H
      // never coexists with the eigenvector array at the finest grids.
      QuantizeOptions qo;
      qo.tail_threshold = cfg_.tol.quantize_tail;
      GridOperator H = build_hamiltonian(cfg_.fields, cfg_.params, cfg_.grid(N), qo, &s.info);
      s.info_valid = true;
      s.ed = eigensolve(std::move(H));
    }
    s.ed_from_cache = false;
    if (cache_) cache_->store(key, *s.ed);
  }
  return *s.ed;
}

bool Workspace::decomp_was_cached(int N) {
  decomp(N);
  return slot(N).ed_from_cache;
}

const GridOperator& Workspace::almost(int N, Branch nu) {
  auto& s = slot(N);
  auto it = s.almost_by_branch.find(sign_of(nu));
  if (it != s.almost_by_branch.end()) return it->second;
  QuantizeOptions qo;
  qo.tail_threshold = cfg_.tol.quantize_tail;
  auto [ins, ok] = s.almost_by_branch.emplace(
      sign_of(nu), almost_projector(nu, cfg_.fields, cfg_.params, cfg_.grid(N), qo));
  (void)ok;
  return ins->second;
}

const GridOperator& Workspace::riesz(int N, Branch nu) {
  auto& s = slot(N);
  auto it = s.riesz_by_branch.find(sign_of(nu));
  if (it != s.riesz_by_branch.end()) return it->second;

  // P- = I - P+ exactly (the almost projectors already sum to the identity),
  // so only one spectral construction is ever run per (scenario, N).
  const Branch primary = Branch::plus;
  if (nu != primary && s.riesz_by_branch.count(sign_of(primary)) == 0) riesz(N, primary);
  if (nu != primary) {
    GridOperator Pm;
    Pm.g = cfg_.grid(N);
    Pm.M = MatX::Identity(Pm.g.dim(), Pm.g.dim()) - s.riesz_by_branch.at(sign_of(primary)).M;
    RieszInfo im = s.riesz_info_by_branch.at(sign_of(primary));
    std::swap(im.gap_below, im.gap_above);
    im.gap_below = 1.0 - im.gap_below;
    im.gap_above = 1.0 - im.gap_above;
    s.riesz_info_by_branch.emplace(sign_of(nu), im);
    auto [ins, ok] = s.riesz_by_branch.emplace(sign_of(nu), std::move(Pm));
    (void)ok;
    return ins->second;
  }

  RieszInfo info;
  auto P = riesz_projector(almost(N, nu), &info);
  s.riesz_info_by_branch.emplace(sign_of(nu), info);
  auto [ins, ok] = s.riesz_by_branch.emplace(sign_of(nu), std::move(P));
  (void)ok;
  return ins->second;
}

const RieszInfo& Workspace::riesz_info(int N, Branch nu) {
  riesz(N, nu);
  return slot(N).riesz_info_by_branch.at(sign_of(nu));
}

const EigenWindow& Workspace::window(int N) {
  auto& s = slot(N);
  if (!s.win) s.win = eig_window(decomp(N), cfg_.E, cfg_.omega);
  return *s.win;
}

const QuasimodeSet& Workspace::quasimode_set(int N, Branch nu) {
  auto& s = slot(N);
  auto it = s.quasimodes_by_branch.find(sign_of(nu));
  if (it != s.quasimodes_by_branch.end()) return it->second;
  const auto& qs = quasimodes(decomp(N), window(N), riesz(N, nu), nu, cfg_.delta);
  auto [ins, ok] = s.quasimodes_by_branch.emplace(sign_of(nu), qs);
  (void)ok;
  return ins->second;
}

GridOperator Workspace::quantize_observable(int N, const ObservableSpec& obs) {
  QuantizeOptions qo;
  qo.tail_threshold = cfg_.tol.quantize_tail;
  return weyl_quantize(*obs.symbol, cfg_.grid(N), qo);
}

const Workspace::ObsStats& Workspace::observable_stats(int N, const ObservableSpec& obs) {
  auto& s = slot(N);
  auto it = s.obs_stats.find(obs.name);
  if (it != s.obs_stats.end()) return it->second;

  const auto& ed = decomp(N);
  const auto& win = window(N);
  const Branch nu = cfg_.branch;
  const bool single_shell = !cfg_.shell_nonempty(other(nu));
  const GridOperator op = quantize_observable(N, obs);

  ObsStats st;
  st.window_expectations.resize(win.indices.size());
  for (std::size_t i = 0; i < win.indices.size(); ++i)
    st.window_expectations[i] = rayleigh(ed.evecs.col(win.indices[i]), op).real();

  try {
    const auto& qs = quasimode_set(N, nu);
    st.quasimode_expectations.resize(qs.indices.size());
    for (std::size_t i = 0; i < qs.indices.size(); ++i)
      st.quasimode_expectations[i] = rayleigh(qs.phi.col(i), op).real();
    if (single_shell) {
      const auto& P = riesz(N, nu);
      for (std::size_t i = 0; i < qs.indices.size(); ++i) {
        const VecX Ppsi = P.M * ed.evecs.col(qs.indices[i]);
        const double ev = Ppsi.dot(op.M * Ppsi).real() / Ppsi.squaredNorm();
        st.eig_variant_dev =
            std::max(st.eig_variant_dev, std::abs(ev - st.quasimode_expectations[i]));
      }
    }
  } catch (const NoQuasimodes&) {
    // window diagnostics still valid without retained quasimodes
  }
  auto [ins, ok] = s.obs_stats.emplace(obs.name, std::move(st));
  (void)ok;
  return ins->second;
}

const VecXd& Workspace::window_expectations(int N, const ObservableSpec& obs) {
  return observable_stats(N, obs).window_expectations;
}

const ShellSample& Workspace::shell(Branch nu) {
  const int key = sign_of(nu);
  auto it = shells_.find(key);
  if (it != shells_.end()) return it->second;
  if (shell_empty_.count(key)) throw EmptyShell("shell empty (cached)");
  ShellOptions so;
  so.momentum_halfwidth = cfg_.P;
  try {
    auto smp = sample_shell(cfg_.E, nu, cfg_.average_samples, cfg_.eta(),
                            Rng::derive(cfg_.seed, 101 + key), cfg_.fields, cfg_.params, so);
    auto [ins, ok] = shells_.emplace(key, std::move(smp));
    (void)ok;
    return ins->second;
  } catch (const EmptyShell&) {
    shell_empty_[key] = true;
    throw;
  }
}

McEstimate Workspace::shell_vol(Branch nu) {
  const int key = sign_of(nu);
  auto it = volumes_.find(key);
  if (it != volumes_.end()) return it->second;
  ShellOptions so;
  so.momentum_halfwidth = cfg_.P;
  McEstimate est{0.0, 0.0};
  if (cfg_.shell_nonempty(nu))
    est = shell_volume(cfg_.E, nu, cfg_.fields, cfg_.params, cfg_.volume_samples,
                       Rng::derive(cfg_.seed, 201 + key), cfg_.eta(), so);
  volumes_[key] = est;
  return est;
}

McEstimate Workspace::classical_trace_average(const ObservableSpec& obs, Branch nu) {
  const std::string key = obs.name + "|" + branch_name(nu);
  auto it = averages_.find(key);
  if (it != averages_.end()) return it->second;
  const auto& smp = shell(nu);
  auto est = liouville_average_symbol(
      [&](const PhasePoint& pt) { return obs.symbol->eval(pt.p, pt.x); }, smp, cfg_.fields,
      cfg_.params);
  averages_[key] = est;
  return est;
}

void Workspace::release_hamiltonian(int N) { slot(N).H.reset(); }

void Workspace::release_almost(int N) { slot(N).almost_by_branch.clear(); }

void Workspace::release_projectors(int N) {
  slot(N).almost_by_branch.clear();
  slot(N).riesz_by_branch.clear();
}

void Workspace::release_decomp(int N) {
  slot(N).ed.reset();
  slot(N).quasimodes_by_branch.clear();
}

void Workspace::release(int N) {
  release_hamiltonian(N);
  release_projectors(N);
  release_decomp(N);
  slot(N).win.reset();
  slot(N).obs_stats.clear();
}

}  // namespace diraclab
