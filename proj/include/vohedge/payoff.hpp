#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vohedge/errors.hpp"
#include "vohedge/numerics.hpp"

namespace vohedge {

struct QuadratureSettings {
  double u_max = 400.0;
  int log2_panels = 13;   // composite Simpson on 2^k uniform panels
  double rel_tol = 1e-7;
  int max_refinements = 3;  // panel doublings allowed past log2_panels
  double tail_tol = 0.05;   // [u_max, 2 u_max] contribution flagged above this
};

struct PayoffAtom {
  Complex z;
  Complex weight;
};

// Tail model for strike-type kernels K^{1-z}/(z(z-1)): against the pure-power
// integrand s^z the kernel asymptote has a closed-form line integral, so the
// quadrature only sees an O(u^-4) residual. Used by reconstruct().
struct StrikeAsymptote {
  double log_strike;
  double center;  // subtraction pole a, kept away from the contour
};

// A weighted vertical line Re z = abscissa carrying kernel(z) dz.
struct ContourLine {
  double abscissa;
  std::function<Complex(Complex)> kernel;
  Complex weight;
  bool conj_symmetric = true;  // kernel(conj z) == conj(kernel(z))
  std::optional<StrikeAsymptote> strike_asymptote;
};

// Finite complex measure Pi for payoffs f(s) = integral of s^z Pi(dz):
// point masses plus weighted vertical-line contours.
class PayoffMeasure {
 public:
  PayoffMeasure(std::vector<PayoffAtom> atoms, std::vector<ContourLine> contours,
                std::string description,
                const QuadratureSettings& settings = QuadratureSettings{});

  const std::vector<PayoffAtom>& atoms() const noexcept { return atoms_; }
  const std::vector<ContourLine>& contours() const noexcept { return contours_; }
  const std::string& description() const noexcept { return description_; }

  // Atom abscissae and contour lines intersected with the real axis (I0).
  std::vector<double> real_support() const;
  // I = [inf I0 ^ 2 inf I0, 2 sup I0 v sup I0 + 1].
  std::pair<double, double> support_interval() const;

  // integral of integrand(z) Pi(dz); conj_symmetric flags that
  // integrand(conj z) == conj(integrand(z)).
  Complex integrate(const std::function<Complex(Complex)>& integrand,
                    const QuadratureSettings& settings,
                    bool conj_symmetric) const;

  // Evaluates f(spot) = integral of spot^z Pi(dz); the imaginary residue is
  // checked against 1e-8 (1 + |result|) and discarded.
  double reconstruct(double spot, const QuadratureSettings& settings) const;

 private:
  std::vector<PayoffAtom> atoms_;
  std::vector<ContourLine> contours_;
  std::string description_;
};

enum class CallVariant {
  abscissa_above_one,     // single contour at R > 1
  abscissa_in_unit_strip  // contour at 0 < R < 1 plus the atom at z = 1
};

PayoffMeasure call_representation(double strike, CallVariant variant, double abscissa);
PayoffMeasure put_representation(double strike, double abscissa);

struct FourierAtom {
  double u;
  Complex weight;
};

// Tail model for densities of the form A e^{-iuL} R(iu) with rational R:
// r1..r3 are the 1/v..1/v^3 Laurent coefficients of R at infinity. Against
// e^{iux} the matched subtraction has a closed-form inverse, leaving an
// O(u^-4) residual for the quadrature. Used by reconstruct().
struct FourierAsymptote {
  double log_level;   // L
  double amplitude;   // A
  double r1, r2, r3;
  double center = 4.0;  // subtraction pole c, off the true poles of R
};

enum class DecayClass { l1, l1_with_u2 };

// Finite measure mu for payoffs f(x) = integral of e^{iux} mu(du), stored as a
// density against du/(2 pi) plus optional point masses.
class FourierMeasure {
 public:
  FourierMeasure(std::function<Complex(double)> density,
                 std::vector<FourierAtom> atoms, std::string description,
                 const QuadratureSettings& settings = QuadratureSettings{},
                 std::optional<FourierAsymptote> asymptote = std::nullopt);

  const std::function<Complex(double)>& density() const noexcept { return density_; }
  const std::vector<FourierAtom>& atoms() const noexcept { return atoms_; }
  const std::string& description() const noexcept { return description_; }
  DecayClass decay_class() const noexcept { return decay_class_; }
  // u^{-1}-boundary densities are inverted with Gaussian damping.
  bool needs_damping() const noexcept { return needs_damping_; }
  double tail_exponent() const noexcept { return tail_exponent_; }
  bool has_density() const noexcept { return static_cast<bool>(density_); }

  Complex integrate(const std::function<Complex(double)>& f,
                    const QuadratureSettings& settings, bool conj_symmetric) const;
  double reconstruct(double x, const QuadratureSettings& settings) const;

 private:
  std::function<Complex(double)> density_;
  std::vector<FourierAtom> atoms_;
  std::string description_;
  DecayClass decay_class_ = DecayClass::l1;
  bool needs_damping_ = false;
  double tail_exponent_ = 0.0;
  std::optional<FourierAsymptote> asymptote_;
};

FourierMeasure digital_asset_or_nothing(double barrier);
FourierMeasure self_quanto_put(double strike);

}  // namespace vohedge
