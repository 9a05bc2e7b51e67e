#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fltc {

/// A membership grade, always inside [0, 1].
class Degree {
 public:
  constexpr Degree() = default;
  /// Throws Error(InvalidInput) outside [0, 1] or for NaN.
  explicit Degree(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

  friend constexpr bool operator==(Degree, Degree) = default;

 private:
  double value_ = 0.0;
};

struct Triangular {
  double a, b, c;
  friend bool operator==(const Triangular&, const Triangular&) = default;
};

struct Trapezoidal {
  double a, b, c, d;
  friend bool operator==(const Trapezoidal&, const Trapezoidal&) = default;
};

/// Piecewise-linear fuzzy set. Vertical edges (a == b, c == d) are allowed
/// and evaluate to 1 at the shared point.
class MembershipFunction {
 public:
  using Shape = std::variant<Triangular, Trapezoidal>;

  static MembershipFunction triangular(double a, double b, double c);
  static MembershipFunction trapezoidal(double a, double b, double c, double d);

  Degree operator()(double x) const;

  /// Extremum used by weighted-average defuzzification: the apex of a
  /// triangle, the plateau midpoint of a trapezoid.
  double peak() const;
  /// Closed interval outside of which the degree is 0.
  std::pair<double, double> support() const;
  /// Largest absolute slope over the ramps (0 for vertical-edge-only shapes).
  double max_slope() const;
  /// Breakpoints in order: 3 for triangles, 4 for trapezoids.
  std::vector<double> points() const;
  std::string_view kind_name() const;

  /// The same shape reflected about `pivot`.
  MembershipFunction reflected(double pivot) const;

  const Shape& shape() const noexcept { return shape_; }

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;

 private:
  explicit MembershipFunction(Shape shape) : shape_(shape) {}
  Shape shape_;
};

/// Free-function form of MembershipFunction::operator().
Degree membership_degree(const MembershipFunction& mf, double x);

struct LinguisticTerm {
  std::string name;
  MembershipFunction mf;
  friend bool operator==(const LinguisticTerm&, const LinguisticTerm&) = default;
};

/// Term name -> degree, keyed by the term's declared spelling.
using TermDegrees = std::map<std::string, Degree>;

class LinguisticVariable {
 public:
  /// Validates the universe, term names (nonempty, unique ignoring case)
  /// and that each term's support intersects the universe.
  LinguisticVariable(std::string name, double lo, double hi, std::vector<LinguisticTerm> terms);

  const std::string& name() const noexcept { return name_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<LinguisticTerm>& terms() const noexcept { return terms_; }

  /// Case-insensitive lookup; nullptr when absent.
  const LinguisticTerm* find_term(std::string_view name) const;
  double clamp(double x) const;

  /// Points of a uniform grid over the universe where every term is 0.
  /// Empty means the universe is covered.
  std::vector<double> coverage_gaps(double step) const;

  friend bool operator==(const LinguisticVariable&, const LinguisticVariable&) = default;

 private:
  std::string name_;
  double lo_;
  double hi_;
  std::vector<LinguisticTerm> terms_;
};

/// Degrees of every term at x, after clamping x into the universe.
/// Throws Error(InvalidInput) for non-finite x.
TermDegrees fuzzify(const LinguisticVariable& var, double x);

/// Input variable "error" over [-50, 50] with terms NEG, SNEG, ZERO, SPOZ, POZ.
LinguisticVariable build_fltc_input_variable();
/// Output variable "pwm" over [0, 255] with terms Z, L, M, H, VH.
LinguisticVariable build_fltc_output_variable();

bool iequals(std::string_view a, std::string_view b);

}  // namespace fltc
