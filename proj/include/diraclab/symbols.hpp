#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "diraclab/dirac.hpp"
#include "diraclab/fields.hpp"

namespace diraclab {

/// A matrix-valued phase-space function B(p, x). eval_column exists so the
/// quantizer can reuse field evaluations across a whole momentum column; the
/// default just loops.
class PhaseSpaceSymbol {
 public:
  virtual ~PhaseSpaceSymbol() = default;
  virtual Mat4 eval(const Vec3& p, const Vec3& x) const = 0;
  virtual void eval_column(const Vec3& x, const std::vector<Vec3>& ps, Mat4* out) const {
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = eval(ps[i], x);
  }
  /// Non-null for symbols constant in (p, x); quantization short-circuits.
  virtual std::optional<Mat4> constant_value() const { return std::nullopt; }
};

/// H_D(p, x).
class DiracSymbol : public PhaseSpaceSymbol {
 public:
  DiracSymbol(const FieldConfig& f, const DiracParams& prm) : f_(f), prm_(prm) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override {
    return eval_dirac_symbol(p, fields_at(f_, x), prm_);
  }
  void eval_column(const Vec3& x, const std::vector<Vec3>& ps, Mat4* out) const override {
    const FieldsAt fa = fields_at(f_, x);
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = eval_dirac_symbol(ps[i], fa, prm_);
  }

 private:
  FieldConfig f_;
  DiracParams prm_;
};

/// pi0^nu(p, x).
class ProjectorSymbol : public PhaseSpaceSymbol {
 public:
  ProjectorSymbol(const FieldConfig& f, const DiracParams& prm, Branch nu)
      : f_(f), prm_(prm), nu_(nu) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override {
    return projector_pi0(p, fields_at(f_, x), prm_, nu_);
  }
  void eval_column(const Vec3& x, const std::vector<Vec3>& ps, Mat4* out) const override {
    const FieldsAt fa = fields_at(f_, x);
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = projector_pi0(ps[i], fa, prm_, nu_);
  }

 private:
  FieldConfig f_;
  DiracParams prm_;
  Branch nu_;
};

/// Constant matrix symbol (identity, spin matrices, ...).
class ConstSymbol : public PhaseSpaceSymbol {
 public:
  explicit ConstSymbol(const Mat4& m) : m_(m) {}
  Mat4 eval(const Vec3&, const Vec3&) const override { return m_; }
  std::optional<Mat4> constant_value() const override { return m_; }

 private:
  Mat4 m_;
};

/// f(x) I4 with f a real trigonometric polynomial.
class ScalarFieldSymbol : public PhaseSpaceSymbol {
 public:
  ScalarFieldSymbol(std::vector<FieldMode> modes, double L) : L_(L) {
    f_.L = L;
    f_.phi = std::move(modes);
  }
  Mat4 eval(const Vec3&, const Vec3& x) const override {
    return f_.eval_phi(x) * Mat4::Identity();
  }
  void eval_column(const Vec3& x, const std::vector<Vec3>& ps, Mat4* out) const override {
    const Mat4 v = f_.eval_phi(x) * Mat4::Identity();
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = v;
  }

 private:
  double L_;
  FieldConfig f_;
};

/// g(p) I4 for a user-supplied scalar momentum function.
class MomentumSymbol : public PhaseSpaceSymbol {
 public:
  explicit MomentumSymbol(std::function<double(const Vec3&)> g) : g_(std::move(g)) {}
  Mat4 eval(const Vec3& p, const Vec3&) const override { return g_(p) * Mat4::Identity(); }

 private:
  std::function<double(const Vec3&)> g_;
};

/// M * cos(2 pi fx . x / L + ax) * cos(pi r . p / P + ap): strictly band
/// limited in both variables whenever |fx_i|, |r_i| <= N/2 - 1; the exact
/// round-trip test class.
class TrigTensorSymbol : public PhaseSpaceSymbol {
 public:
  TrigTensorSymbol(const Mat4& m, Vec3i fx, double ax, Vec3i r, double ap, double L, double P)
      : m_(m), fx_(fx), ax_(ax), r_(r), ap_(ap), L_(L), P_(P) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override {
    const double cx = std::cos(2.0 * pi / L_ * fx_.cast<double>().dot(x) + ax_);
    const double cp = std::cos(pi / P_ * r_.cast<double>().dot(p) + ap_);
    return cx * cp * m_;
  }

 private:
  Mat4 m_;
  Vec3i fx_, r_;
  double ax_, ap_, L_, P_;
};

/// pi0^nu B pi0^nu.
class SandwichSymbol : public PhaseSpaceSymbol {
 public:
  SandwichSymbol(std::shared_ptr<const PhaseSpaceSymbol> inner, const FieldConfig& f,
                 const DiracParams& prm, Branch nu)
      : inner_(std::move(inner)), f_(f), prm_(prm), nu_(nu) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override {
    const Mat4 proj = projector_pi0(p, fields_at(f_, x), prm_, nu_);
    return proj * inner_->eval(p, x) * proj;
  }
  void eval_column(const Vec3& x, const std::vector<Vec3>& ps, Mat4* out) const override {
    const FieldsAt fa = fields_at(f_, x);
    inner_->eval_column(x, ps, out);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Mat4 proj = projector_pi0(ps[i], fa, prm_, nu_);
      out[i] = proj * out[i] * proj;
    }
  }

 private:
  std::shared_ptr<const PhaseSpaceSymbol> inner_;
  FieldConfig f_;
  DiracParams prm_;
  Branch nu_;
};

/// pi0^+ C pi0^- + h.c. -- purely off-diagonal in the branch blocks.
class OffdiagSymbol : public PhaseSpaceSymbol {
 public:
  OffdiagSymbol(const Mat4& c, const FieldConfig& f, const DiracParams& prm)
      : c_(c), f_(f), prm_(prm) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override {
    const FieldsAt fa = fields_at(f_, x);
    const Mat4 pp = projector_pi0(p, fa, prm_, Branch::plus);
    const Mat4 pm = Mat4::Identity() - pp;
    const Mat4 half = pp * c_ * pm;
    return half + half.adjoint();
  }

 private:
  Mat4 c_;
  FieldConfig f_;
  DiracParams prm_;
};

/// exp(-(|p| - r0)^2 / w^2) I4: a momentum bump used as an off-shell test
/// symbol for the phase-space limit checks.
class RadialBumpSymbol : public PhaseSpaceSymbol {
 public:
  RadialBumpSymbol(double r0, double w) : r0_(r0), w_(w) {}
  Mat4 eval(const Vec3& p, const Vec3&) const override {
    const double d = (p.norm() - r0_) / w_;
    return std::exp(-d * d) * Mat4::Identity();
  }

 private:
  double r0_, w_;
};

/// Arbitrary callable, for tests.
class LambdaSymbol : public PhaseSpaceSymbol {
 public:
  explicit LambdaSymbol(std::function<Mat4(const Vec3&, const Vec3&)> fn) : fn_(std::move(fn)) {}
  Mat4 eval(const Vec3& p, const Vec3& x) const override { return fn_(p, x); }

 private:
  std::function<Mat4(const Vec3&, const Vec3&)> fn_;
};

}  // namespace diraclab
