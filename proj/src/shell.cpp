#include "diraclab/shell.hpp"

#include <cmath>

#include "diraclab/errors.hpp"
#include "diraclab/rng.hpp"

namespace diraclab {

ShellSample sample_shell(double E, Branch nu, std::size_t n, double eta, std::uint64_t seed,
                         const FieldConfig& f, const DiracParams& prm, const ShellOptions& opts) {
  if (n == 0 || eta <= 0.0 || opts.momentum_halfwidth <= 0.0)
    throw ConfigInvalid("sample_shell: need n >= 1, eta > 0 and a momentum box");
  const double P = opts.momentum_halfwidth;

  ShellSample out;
  out.E = E;
  out.nu = nu;
  out.eta = eta;
  out.points.reserve(n);
  out.weights.reserve(n);

  Rng rng(seed);
  std::uint64_t proposed = 0;
  while (out.points.size() < n) {
    if (proposed >= opts.max_proposals ||
        (out.points.empty() && proposed >= opts.empty_budget)) {
      if (out.points.empty())
        throw EmptyShell("no acceptance after " + std::to_string(proposed) + " proposals");
      break;  // partial sample: extremely thin shell; callers see fewer points
    }
    PhasePoint pt;
    for (int i = 0; i < 3; ++i) pt.p[i] = rng.uniform(-P, P);
    for (int i = 0; i < 3; ++i) pt.x[i] = rng.uniform(0.0, f.L);
    ++proposed;
    if (std::abs(eval_h(pt, f, prm, nu) - E) <= eta) {
      const HGradient g = grad_h(pt, f, prm, nu);
      const double gn = std::sqrt(g.dp.squaredNorm() + g.dx.squaredNorm());
      out.points.push_back(pt);
      out.weights.push_back(1.0 / gn);
    }
  }
  out.proposals = proposed;
  out.acceptance = proposed ? static_cast<double>(out.points.size()) / proposed : 0.0;
  return out;
}

McEstimate shell_volume(double E, Branch nu, const FieldConfig& f, const DiracParams& prm,
                        std::size_t n, std::uint64_t seed, double eta,
                        const ShellOptions& opts) {
  const double P = opts.momentum_halfwidth;
  if (n == 0 || eta <= 0.0 || P <= 0.0)
    throw ConfigInvalid("shell_volume: need n >= 1, eta > 0 and a momentum box");

  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    PhasePoint pt;
    for (int k = 0; k < 3; ++k) pt.p[k] = rng.uniform(-P, P);
    for (int k = 0; k < 3; ++k) pt.x[k] = rng.uniform(0.0, f.L);
    if (std::abs(eval_h(pt, f, prm, nu) - E) <= eta) ++hits;
  }
  const double box = std::pow(2.0 * P, 3) * std::pow(f.L, 3);
  const double frac = static_cast<double>(hits) / n;
  McEstimate est;
  est.value = box * frac / (2.0 * eta);
  est.std_error = box * std::sqrt(frac * (1.0 - frac) / n) / (2.0 * eta);
  return est;
}

McEstimate liouville_average(const std::function<double(const PhasePoint&)>& fn,
                             const ShellSample& sample) {
  if (sample.points.empty()) throw EmptyShell("liouville_average on empty sample");
  double sum = 0.0, sum2 = 0.0;
  for (const auto& pt : sample.points) {
    const double v = fn(pt);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(sample.points.size());
  McEstimate est;
  est.value = sum / n;
  const double var = std::max(0.0, sum2 / n - est.value * est.value);
  est.std_error = std::sqrt(var / n);
  return est;
}

McEstimate liouville_average_symbol(const std::function<Mat4(const PhasePoint&)>& symbol,
                                    const ShellSample& sample, const FieldConfig& f,
                                    const DiracParams& prm) {
  return liouville_average(
      [&](const PhasePoint& pt) {
        const Mat4 proj = projector_pi0(pt, f, prm, sample.nu);
        return (proj * symbol(pt) * proj).trace().real();
      },
      sample);
}

double free_shell_volume(double E, double L, const DiracParams& prm) {
  const double mc2 = prm.m * prm.c * prm.c;
  if (E <= mc2) return 0.0;
  const double pE = std::sqrt(E * E - mc2 * mc2) / prm.c;
  return 4.0 * pi * L * L * L * pE * E / (prm.c * prm.c);
}

}  // namespace diraclab
