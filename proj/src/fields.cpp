#include "diraclab/fields.hpp"

#include <cmath>

#include "diraclab/errors.hpp"
#include "json.hpp"

namespace diraclab {

namespace {

double eval_modes(const std::vector<FieldMode>& modes, const Vec3& x, double L) {
  double v = 0.0;
  const double w = 2.0 * pi / L;
  for (const auto& m : modes) v += m.amp * std::cos(w * m.k.cast<double>().dot(x) + m.phase);
  return v;
}

Vec3 grad_modes(const std::vector<FieldMode>& modes, const Vec3& x, double L) {
  Vec3 g = Vec3::Zero();
  const double w = 2.0 * pi / L;
  for (const auto& m : modes) {
    const double s = -m.amp * std::sin(w * m.k.cast<double>().dot(x) + m.phase);
    g += s * w * m.k.cast<double>();
  }
  return g;
}

}  // namespace

double FieldConfig::eval_phi(const Vec3& x) const { return eval_modes(phi, x, L); }
Vec3 FieldConfig::grad_phi(const Vec3& x) const { return grad_modes(phi, x, L); }

Vec3 FieldConfig::eval_A(const Vec3& x) const {
  return {eval_modes(A[0], x, L), eval_modes(A[1], x, L), eval_modes(A[2], x, L)};
}

Mat3 FieldConfig::grad_A(const Vec3& x) const {
  Mat3 J;
  for (int i = 0; i < 3; ++i) J.row(i) = grad_modes(A[i], x, L).transpose();
  return J;
}

int FieldConfig::max_mode() const {
  int k = 0;
  auto scan = [&k](const std::vector<FieldMode>& ms) {
    for (const auto& m : ms) k = std::max(k, m.k.cwiseAbs().maxCoeff());
  };
  scan(phi);
  for (const auto& a : A) scan(a);
  return k;
}

double FieldConfig::phi_bound() const {
  double b = 0.0;
  for (const auto& m : phi) b += std::abs(m.amp);
  return b;
}

EBFields fields_EB(const FieldConfig& f, const Vec3& x) {
  EBFields out;
  out.E = -f.grad_phi(x);
  const Mat3 J = f.grad_A(x);  // J(i,j) = dA_i/dx_j
  out.B = {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
  return out;
}

namespace {

nlohmann::json modes_to_json(const std::vector<FieldMode>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : ms) a.push_back({m.k[0], m.k[1], m.k[2], m.amp, m.phase});
  return a;
}

std::vector<FieldMode> modes_from_json(const nlohmann::json& a) {
  std::vector<FieldMode> ms;
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 5)
      throw ConfigInvalid("field mode must be [k1,k2,k3,amp,phase]");
    FieldMode m;
    m.k = Vec3i(e[0].get<int>(), e[1].get<int>(), e[2].get<int>());
    m.amp = e[3].get<double>();
    m.phase = e[4].get<double>();
    ms.push_back(m);
  }
  return ms;
}

}  // namespace

std::string FieldConfig::to_json() const {
  nlohmann::json j;
  j["L"] = L;
  j["phi"] = modes_to_json(phi);
  j["A1"] = modes_to_json(A[0]);
  j["A2"] = modes_to_json(A[1]);
  j["A3"] = modes_to_json(A[2]);
  return j.dump(2);
}

FieldConfig FieldConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("field config parse error: ") + e.what());
  }
  FieldConfig f;
  f.L = j.value("L", 2.0 * pi);
  if (f.L <= 0.0) throw ConfigInvalid("box length must be positive");
  if (j.contains("phi")) f.phi = modes_from_json(j["phi"]);
  const char* keys[3] = {"A1", "A2", "A3"};
  for (int i = 0; i < 3; ++i)
    if (j.contains(keys[i])) f.A[i] = modes_from_json(j[keys[i]]);
  return f;
}

}  // namespace diraclab
