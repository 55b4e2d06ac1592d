// Exact evaluation of the parameter constraint system.
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

#include "lipemb/core.hpp"
#include "lipemb/params.hpp"

namespace lipemb {

namespace mp = boost::multiprecision;

namespace {

using Rational = mp::cpp_rational;

// Doubles are binary fractions, so the conversion is exact.
Rational exact(double d) {
  if (!std::isfinite(d)) throw ConfigError("non-finite parameter");
  int e = 0;
  const double frac = std::frexp(d, &e);
  const auto mant = static_cast<long long>(std::ldexp(frac, 53));
  mp::cpp_int num = mant;
  mp::cpp_int den = 1;
  const int shift = e - 53;
  if (shift >= 0) num <<= shift;
  else den <<= -shift;
  return Rational(num, den);
}

Rational exact(std::int64_t v) { return Rational(v); }

std::string show(const Rational& r) {
  std::ostringstream o;
  if (mp::denominator(r) == 1) o << mp::numerator(r);
  else o << mp::numerator(r) << '/' << mp::denominator(r);
  return o.str();
}

ConstraintRow compare(std::string name, const Rational& lhs, const Rational& rhs, bool strict) {
  ConstraintRow row;
  row.name = std::move(name);
  row.lhs = show(lhs);
  row.rhs = show(rhs);
  row.slack = show(lhs - rhs);
  const bool ok = strict ? lhs > rhs : lhs >= rhs;
  row.verdict = ok ? Verdict::Satisfied : Verdict::Violated;
  return row;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

ConstraintReport check_constraints(const ParameterSet& p) {
  if (!(p.alpha > 0 && p.beta > 0 && p.gamma > 0 && p.m > 0) || p.k0 <= 0 || p.v0 <= 0)
    throw PreconditionError("constraint audit needs positive parameters");
  const Rational a = exact(p.alpha), b = exact(p.beta), g = exact(p.gamma), m = exact(p.m);
  const Rational k0 = exact(p.k0), v0 = exact(p.v0);

  ConstraintReport rep;
  rep.rows.push_back(compare("alpha > 6", a, 6, true));
  rep.rows.push_back(compare("gamma > 40 alpha", g, 40 * a, true));
  rep.rows.push_back(compare("beta > 1500 alpha gamma", b, 1500 * a * g, true));
  rep.rows.push_back(compare("k0 > 6000 alpha gamma", k0, 6000 * a * g, true));
  rep.rows.push_back(compare("v0 > 3000 alpha", v0, 3000 * a, true));
  rep.rows.push_back(compare("8 gamma (v0 - 1) > 3 alpha beta", 8 * g * (v0 - 1), 3 * a * b, true));
  rep.rows.push_back(compare("m >= 9 alpha beta + 3 alpha gamma v0", m, 9 * a * b + 3 * a * g * v0, false));
  rep.rows.push_back(compare("gamma k0 > 300 alpha beta", g * k0, 300 * a * b, true));
  rep.rows.push_back(compare("k0 > 10 gamma", k0, 10 * g, true));

  // (1 - 1e-10)^(4 v0) > 9/10, evaluated with 50 significant digits. The
  // evaluation error is far below the 1e-15 band inside which the verdict is
  // reported as inconclusive.
  {
    using Dec = mp::cpp_dec_float_50;
    const Dec base = Dec(1) - Dec("1e-10");
    const Dec lhs = mp::pow(base, Dec(4) * Dec(p.v0));
    const Dec rhs = Dec(9) / Dec(10);
    const Dec diff = lhs - rhs;
    ConstraintRow row;
    row.name = "(1 - 1e-10)^(4 v0) > 9/10";
    row.lhs = lhs.str(20, std::ios_base::fixed);
    row.rhs = "9/10";
    row.slack = diff.str(20, std::ios_base::scientific);
    if (mp::abs(diff) <= Dec("1e-15")) row.verdict = Verdict::Inconclusive;
    else row.verdict = diff > 0 ? Verdict::Satisfied : Verdict::Violated;
    rep.rows.push_back(row);
  }

  rep.overall = true;
  for (const auto& r : rep.rows) rep.overall = rep.overall && r.verdict == Verdict::Satisfied;
  return rep;
}

}  // namespace lipemb
