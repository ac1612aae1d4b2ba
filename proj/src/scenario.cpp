#include "diraclab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "diraclab/cache.hpp"
#include "diraclab/errors.hpp"
#include "json.hpp"

namespace diraclab {

double ScenarioConfig::shell_momentum_radius(Branch nu) const {
  // h_nu(p, x) = e phi(x) + nu M: the shell reaches kinetic momentum
  // |pi| = sqrt((E - e phi)^2 - m^2 c^4)/c wherever nu (E - e phi) >= m c^2.
  const double mc2 = params.m * params.c * params.c;
  const double bound = fields.phi_bound() * std::abs(params.e);
  const double reach = sign_of(nu) > 0 ? E + bound : -(E - bound);  // max nu(E - e phi)
  if (reach < mc2) return -1.0;
  return std::sqrt(reach * reach - mc2 * mc2) / params.c;
}

void ScenarioConfig::validate() const {
  if (params.m <= 0 || params.c <= 0) throw ConfigInvalid("need m > 0 and c > 0");
  if (fields.L <= 0 || P <= 0) throw ConfigInvalid("need positive box and momentum cutoff");
  if (N_list.empty()) throw ConfigInvalid("empty N list");
  int prev = 0;
  for (int n : N_list) {
    if (n <= prev || n % 2 != 0) throw ConfigInvalid("N list must be strictly increasing even");
    prev = n;
  }
  if (!(omega > 0) || !(delta > 0 && delta < 1) || !(tau > 0) || !(eta_rel > 0))
    throw ConfigInvalid("tolerances must be positive (and 0 < delta < 1)");
  if (tol.energy_drift <= 0 || tol.su2_residual <= 0 || tol.spin_compat <= 0 ||
      tol.cocycle <= 0 || tol.quantize_tail <= 0)
    throw ConfigInvalid("tolerance table entries must be positive");
  if (E < window_valid_lo || E > window_valid_hi)
    throw ConfigInvalid("E outside the scenario's declared window validity range");

  // Potentials must be resolvable on the coarsest grid.
  const int kmax = fields.max_mode();
  if (kmax > N_list.front() / 2 - 1)
    throw ConfigInvalid("potential mode " + std::to_string(kmax) +
                        " is not band-limited on the coarsest grid");

  // Energy shells must sit well inside the momentum cutoff. The vector
  // potential shifts canonical momentum by (e/c) A on top of the kinetic
  // shell radius.
  double amax = 0.0;
  for (int i = 0; i < 3; ++i)
    for (const auto& m : fields.A[i]) amax += std::abs(m.amp);
  for (Branch nu : {Branch::plus, Branch::minus}) {
    const double r = shell_momentum_radius(nu);
    if (r > 0 && r + std::abs(params.e / params.c) * amax > 0.6 * P)
      throw ConfigInvalid(std::string("shell for branch ") + branch_name(nu) +
                          " exceeds 0.6 P");
  }
  if (!shell_nonempty(Branch::plus) && !shell_nonempty(Branch::minus))
    throw ConfigInvalid("both energy shells empty at E");
}

std::uint64_t ScenarioConfig::hamiltonian_key(int N) const {
  std::ostringstream os;
  os.precision(17);
  os << "L=" << fields.L << ";P=" << P << ";N=" << N << ";m=" << params.m << ";c=" << params.c
     << ";e=" << params.e << ";phi=";
  auto dump = [&os](const std::vector<FieldMode>& ms) {
    for (const auto& m : ms)
      os << m.k[0] << "," << m.k[1] << "," << m.k[2] << "," << m.amp << "," << m.phase << ";";
  };
  dump(fields.phi);
  for (int i = 0; i < 3; ++i) {
    os << "A" << i << "=";
    dump(fields.A[i]);
  }
  return fnv1a(os.str());
}

namespace {

nlohmann::json modes_json(const std::vector<FieldMode>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : ms) a.push_back({m.k[0], m.k[1], m.k[2], m.amp, m.phase});
  return a;
}

std::vector<FieldMode> modes_parse(const nlohmann::json& a) {
  std::vector<FieldMode> out;
  for (const auto& e : a) {
    FieldMode m;
    m.k = Vec3i(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>());
    m.amp = e.at(3).get<double>();
    m.phase = e.at(4).get<double>();
    out.push_back(m);
  }
  return out;
}

}  // namespace

std::string ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["tag"] = tag;
  j["L"] = fields.L;
  j["P"] = P;
  j["phi"] = modes_json(fields.phi);
  j["A1"] = modes_json(fields.A[0]);
  j["A2"] = modes_json(fields.A[1]);
  j["A3"] = modes_json(fields.A[2]);
  j["m"] = params.m;
  j["c"] = params.c;
  j["e"] = params.e;
  j["N_list"] = N_list;
  j["E"] = E;
  j["omega"] = omega;
  j["delta"] = delta;
  j["tau"] = tau;
  j["eta_rel"] = eta_rel;
  j["egorov_time"] = egorov_time;
  j["egorov_samples"] = egorov_samples;
  j["branch"] = branch == Branch::plus ? "plus" : "minus";
  j["seed"] = seed;
  j["volume_samples"] = volume_samples;
  j["average_samples"] = average_samples;
  j["window_valid"] = {window_valid_lo, window_valid_hi};
  j["tol"] = {{"energy_drift", tol.energy_drift},
              {"su2_residual", tol.su2_residual},
              {"spin_compat", tol.spin_compat},
              {"cocycle", tol.cocycle},
              {"quantize_tail", tol.quantize_tail},
              {"slope_min", tol.slope_min}};
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("scenario parse error: ") + e.what());
  }
  ScenarioConfig c;
  try {
    c.tag = j.value("tag", "CUSTOM");
    c.fields.L = j.value("L", 2.0 * pi);
    c.P = j.value("P", pi);
    if (j.contains("phi")) c.fields.phi = modes_parse(j["phi"]);
    const char* keys[3] = {"A1", "A2", "A3"};
    for (int i = 0; i < 3; ++i)
      if (j.contains(keys[i])) c.fields.A[i] = modes_parse(j[keys[i]]);
    c.params.m = j.value("m", 1.0);
    c.params.c = j.value("c", 1.0);
    c.params.e = j.value("e", 1.0);
    if (j.contains("N_list")) c.N_list = j["N_list"].get<std::vector<int>>();
    c.E = j.value("E", 1.2);
    c.omega = j.value("omega", 1.0);
    c.delta = j.value("delta", 0.1);
    c.tau = j.value("tau", 0.05);
    c.eta_rel = j.value("eta_rel", 1e-3);
    c.egorov_time = j.value("egorov_time", 1.0);
    c.egorov_samples = j.value("egorov_samples", 256);
    c.branch = j.value("branch", "plus") == std::string("minus") ? Branch::minus : Branch::plus;
    c.seed = j.value("seed", std::uint64_t{1});
    c.volume_samples = j.value("volume_samples", std::uint64_t{30'000'000});
    c.average_samples = j.value("average_samples", std::uint64_t{20'000});
    if (j.contains("window_valid")) {
      c.window_valid_lo = j["window_valid"].at(0).get<double>();
      c.window_valid_hi = j["window_valid"].at(1).get<double>();
    }
    if (j.contains("tol")) {
      const auto& t = j["tol"];
      c.tol.energy_drift = t.value("energy_drift", c.tol.energy_drift);
      c.tol.su2_residual = t.value("su2_residual", c.tol.su2_residual);
      c.tol.spin_compat = t.value("spin_compat", c.tol.spin_compat);
      c.tol.cocycle = t.value("cocycle", c.tol.cocycle);
      c.tol.quantize_tail = t.value("quantize_tail", c.tol.quantize_tail);
      c.tol.slope_min = t.value("slope_min", c.tol.slope_min);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("scenario field error: ") + e.what());
  }
  return c;
}

ScenarioConfig ScenarioConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

ScenarioConfig ScenarioConfig::preset(const std::string& tag) {
  ScenarioConfig c;
  c.tag = tag;
  const double L = 2.0 * pi;
  c.fields.L = L;
  if (tag == "FREE") {
    c.E = 1.2;
    c.omega = 1.2;
  } else if (tag == "WEAK_SCALAR") {
    c.fields.phi = {{{1, 0, 0}, 0.10, 0.3}, {{0, 1, 0}, 0.07, 1.4}, {{0, 0, 1}, 0.05, 2.6}};
    c.E = 1.2;
    c.omega = 1.2;
    // Spectrum keeps a gap around 0 (|phi| well below m c^2) and the
    // antiparticle shell at E is empty: the eigenspinor QE variant applies.
    c.window_valid_lo = 0.25;
    c.window_valid_hi = 2.5;
  } else if (tag == "MAGNETIC") {
    const double B0 = 0.45;
    c.fields.A[1] = {{{1, 0, 0}, B0 * L / (2.0 * pi), -pi / 2.0}};
    c.fields.A[2] = {{{0, 1, 0}, 0.12, 0.3}};
    c.E = 1.3;
    c.omega = 1.2;
  } else if (tag == "CHAOTIC") {
    c.fields.phi = {{{1, 0, 0}, 0.16, 0.2},
                    {{0, 1, 0}, 0.13, 1.9},
                    {{0, 0, 1}, 0.11, 4.0},
                    {{1, 1, 0}, 0.09, 2.7},
                    {{1, -1, 1}, 0.07, 0.9}};
    c.fields.A[0] = {{{0, 1, 0}, 0.14, 0.5}, {{0, 0, 1}, 0.09, 2.2}};
    c.fields.A[1] = {{{1, 0, 0}, 0.14, 1.2}, {{0, 0, 1}, 0.08, 3.3}};
    c.fields.A[2] = {{{1, 1, 0}, 0.10, 0.7}, {{1, 0, 0}, 0.07, 5.1}};
    c.E = 1.35;
    c.omega = 1.2;
  } else {
    throw ConfigInvalid("unknown preset " + tag);
  }
  return c;
}

std::vector<ObservableSpec> ScenarioConfig::observables() const {
  std::vector<ObservableSpec> obs;
  obs.push_back({"scalar_x", std::make_shared<ScalarFieldSymbol>(
                                 std::vector<FieldMode>{{{1, 0, 0}, 1.0, 0.0}}, fields.L)});
  obs.push_back({"momentum_sq",
                 std::make_shared<MomentumSymbol>([](const Vec3& p) { return p.squaredNorm(); })});
  obs.push_back({"spin_z", std::make_shared<ConstSymbol>(dirac_sigma(2))});
  return obs;
}

}  // namespace diraclab
