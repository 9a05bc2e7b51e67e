#include "fltc/membership.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fltc/error.hpp"

namespace fltc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double rising(double x, double a, double b) { return (x - a) / (b - a); }
double falling(double x, double c, double d) { return (d - x) / (d - c); }

}  // namespace

Degree::Degree(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "degree out of [0, 1]: " + std::to_string(value));
  }
}

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
  if (!all_finite({a, b, c}) || !(a <= b && b <= c) || !(a < c)) {
    throw Error(ErrorKind::InvalidShape, "triangular breakpoints must satisfy a <= b <= c and a < c");
  }
  return MembershipFunction(Triangular{a, b, c});
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
  if (!all_finite({a, b, c, d}) || !(a <= b && b <= c && c <= d) || !(a < d)) {
    throw Error(ErrorKind::InvalidShape, "trapezoidal breakpoints must satisfy a <= b <= c <= d and a < d");
  }
  return MembershipFunction(Trapezoidal{a, b, c, d});
}

Degree MembershipFunction::operator()(double x) const {
  const double mu = std::visit(
      overloaded{
          [x](const Triangular& t) {
            if (x < t.a || x > t.c) return 0.0;
            if (x == t.b) return 1.0;
            return x < t.b ? rising(x, t.a, t.b) : falling(x, t.b, t.c);
          },
          [x](const Trapezoidal& t) {
            if (x < t.a || x > t.d) return 0.0;
            if (x >= t.b && x <= t.c) return 1.0;
            return x < t.b ? rising(x, t.a, t.b) : falling(x, t.c, t.d);
          },
      },
      shape_);
  return Degree(std::clamp(mu, 0.0, 1.0));
}

double MembershipFunction::peak() const {
  return std::visit(overloaded{
                        [](const Triangular& t) { return t.b; },
                        [](const Trapezoidal& t) { return 0.5 * (t.b + t.c); },
                    },
                    shape_);
}

std::pair<double, double> MembershipFunction::support() const {
  return std::visit(overloaded{
                        [](const Triangular& t) { return std::pair{t.a, t.c}; },
                        [](const Trapezoidal& t) { return std::pair{t.a, t.d}; },
                    },
                    shape_);
}

double MembershipFunction::max_slope() const {
  auto slope = [](double lo, double hi) { return hi > lo ? 1.0 / (hi - lo) : 0.0; };
  return std::visit(overloaded{
                        [&](const Triangular& t) { return std::max(slope(t.a, t.b), slope(t.b, t.c)); },
                        [&](const Trapezoidal& t) { return std::max(slope(t.a, t.b), slope(t.c, t.d)); },
                    },
                    shape_);
}

std::vector<double> MembershipFunction::points() const {
  return std::visit(overloaded{
                        [](const Triangular& t) { return std::vector<double>{t.a, t.b, t.c}; },
                        [](const Trapezoidal& t) { return std::vector<double>{t.a, t.b, t.c, t.d}; },
                    },
                    shape_);
}

std::string_view MembershipFunction::kind_name() const {
  return std::holds_alternative<Triangular>(shape_) ? "triangular" : "trapezoidal";
}

MembershipFunction MembershipFunction::reflected(double pivot) const {
  const auto r = [pivot](double x) { return 2.0 * pivot - x; };
  return std::visit(overloaded{
                        [&](const Triangular& t) { return triangular(r(t.c), r(t.b), r(t.a)); },
                        [&](const Trapezoidal& t) { return trapezoidal(r(t.d), r(t.c), r(t.b), r(t.a)); },
                    },
                    shape_);
}

Degree membership_degree(const MembershipFunction& mf, double x) { return mf(x); }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

LinguisticVariable::LinguisticVariable(std::string name, double lo, double hi, std::vector<LinguisticTerm> terms)
    : name_(std::move(name)), lo_(lo), hi_(hi), terms_(std::move(terms)) {
  if (name_.empty()) {
    throw Error(ErrorKind::InvalidVariable, "variable name must be nonempty");
  }
  if (!(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_)) {
    throw Error(ErrorKind::InvalidVariable, "variable '" + name_ + "': universe requires lo < hi");
  }
  if (terms_.empty()) {
    throw Error(ErrorKind::InvalidVariable, "variable '" + name_ + "' has no terms");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& term = terms_[i];
    if (term.name.empty()) {
      throw Error(ErrorKind::InvalidVariable, "variable '" + name_ + "': term name must be nonempty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(terms_[j].name, term.name)) {
        throw Error(ErrorKind::InvalidVariable, "variable '" + name_ + "': duplicate term '" + term.name + "'");
      }
    }
    const auto [s_lo, s_hi] = term.mf.support();
    if (s_hi < lo_ || s_lo > hi_) {
      throw Error(ErrorKind::InvalidVariable,
                  "variable '" + name_ + "': term '" + term.name + "' lies outside the universe");
    }
  }
}

const LinguisticTerm* LinguisticVariable::find_term(std::string_view name) const {
  const auto it = std::find_if(terms_.begin(), terms_.end(), [&](const auto& t) { return iequals(t.name, name); });
  return it == terms_.end() ? nullptr : &*it;
}

double LinguisticVariable::clamp(double x) const { return std::clamp(x, lo_, hi_); }

std::vector<double> LinguisticVariable::coverage_gaps(double step) const {
  if (!(step > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "coverage step must be positive");
  }
  std::vector<double> gaps;
  const auto n = static_cast<long>(std::floor((hi_ - lo_) / step));
  for (long i = 0; i <= n + 1; ++i) {
    const double x = std::min(lo_ + static_cast<double>(i) * step, hi_);
    const bool covered = std::any_of(terms_.begin(), terms_.end(), [x](const auto& t) { return t.mf(x) > 0.0; });
    if (!covered) gaps.push_back(x);
    if (x == hi_) break;
  }
  return gaps;
}

TermDegrees fuzzify(const LinguisticVariable& var, double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::InvalidInput, "non-finite input for variable '" + var.name() + "'");
  }
  const double clamped = var.clamp(x);
  TermDegrees out;
  for (const auto& term : var.terms()) {
    out.emplace(term.name, term.mf(clamped));
  }
  return out;
}

LinguisticVariable build_fltc_input_variable() {
  using MF = MembershipFunction;
  return LinguisticVariable("error", -50.0, 50.0,
                            {
                                {"NEG", MF::trapezoidal(-50.0, -50.0, -25.0, -15.0)},
                                {"SNEG", MF::triangular(-50.0, -25.0, 0.0)},
                                {"ZERO", MF::triangular(-15.0, 0.0, 15.0)},
                                {"SPOZ", MF::triangular(0.0, 25.0, 50.0)},
                                {"POZ", MF::trapezoidal(15.0, 25.0, 50.0, 50.0)},
                            });
}

LinguisticVariable build_fltc_output_variable() {
  using MF = MembershipFunction;
  // Apexes sit at the midpoints of the tabulated output ranges.
  return LinguisticVariable("pwm", 0.0, 255.0,
                            {
                                {"Z", MF::triangular(0.0, 44.625, 89.25)},
                                {"L", MF::triangular(51.0, 89.0, 127.0)},
                                {"M", MF::triangular(89.25, 127.5, 165.75)},
                                {"H", MF::triangular(127.0, 165.5, 204.0)},
                                {"VH", MF::triangular(165.75, 210.375, 255.0)},
                            });
}

}  // namespace fltc
