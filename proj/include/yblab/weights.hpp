#pragma once

#include <string>
#include <variant>

#include "yblab/budget.hpp"
#include "yblab/specfun.hpp"

namespace yblab::weights {

struct Spin {
  double x = 0.0;
};

/// Site variable of the gamma-function model: a real and an integer component.
struct DualSpin {
  double x = 0.0;
  long n = 0;
};

using AnySpin = std::variant<Spin, DualSpin>;

/// Reduce an elliptic-model spin into the fundamental domain [0, pi).
double canonical_spin(double x);

/// Spectral parameter checked against the physical domain 0 < value < eta.
struct SpectralParam {
  double value;
  double model_eta;

  static SpectralParam physical(double value, double model_eta);
};

enum class ModelKind { Elliptic, Hyperbolic, Gamma };

struct EllipticModel {
  specfun::EllipticNomes nomes;
};
struct HyperbolicModel {
  specfun::ModularParam b;
};
struct GammaModel {};

/// One of the three weight families. Immutable once built.
class Model {
 public:
  static Model elliptic(double p, double q, const PrecisionBudget& budget = {});
  static Model hyperbolic(const specfun::ModularParam& b, const PrecisionBudget& budget = {});
  static Model gamma();

  ModelKind kind() const noexcept;
  /// Crossing parameter; 1 for the gamma model.
  double eta() const noexcept { return eta_; }
  std::string name() const;
  const PrecisionBudget& budget() const noexcept { return budget_; }

  const EllipticModel* as_elliptic() const noexcept { return std::get_if<EllipticModel>(&variant_); }
  const HyperbolicModel* as_hyperbolic() const noexcept { return std::get_if<HyperbolicModel>(&variant_); }
  bool uses_dual_spins() const noexcept { return kind() == ModelKind::Gamma; }

 private:
  Model(std::variant<EllipticModel, HyperbolicModel, GammaModel> v, double eta, PrecisionBudget budget)
      : variant_(std::move(v)), eta_(eta), budget_(budget) {}

  std::variant<EllipticModel, HyperbolicModel, GammaModel> variant_;
  double eta_;
  PrecisionBudget budget_;
};

/// Edge weight W_alpha at a fixed spectral value, with the normalisation
/// precomputed. The weight is assembled in log space; the imaginary part of
/// the log (mod 2 pi) must vanish to 1e-9 or RealityViolation is thrown.
class EdgeWeight {
 public:
  EdgeWeight(const Model& model, double alpha);

  double log_value(double x1, long n1, double x2, long n2) const;
  double log_value(const AnySpin& s1, const AnySpin& s2) const;
  double value(const AnySpin& s1, const AnySpin& s2) const;

  double alpha() const noexcept { return alpha_; }
  const Model& model() const noexcept { return model_; }

 private:
  Model model_;
  double alpha_;
  Complex log_norm_{};  // log of the spin-independent prefactor
};

/// Single-spin weight; zero allowed. The log returns -inf at zeros.
double log_single_spin_weight(const Model& model, double x, long n);
double single_spin_weight(const Model& model, const AnySpin& s);

double edge_weight(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2);
double edge_weight(const Model& model, SpectralParam alpha, const AnySpin& s1, const AnySpin& s2);
/// Weight on the crossed (vertical) edge: W_{eta - alpha}.
double crossed_edge_weight(const Model& model, double alpha, const AnySpin& s1, const AnySpin& s2);

/// Tolerance on the imaginary residue of log W.
inline constexpr double kRealityTol = 1e-9;

/// Reduce an angle to (-pi, pi].
double wrap_phase(double phi);

}  // namespace yblab::weights
