#include "rwdre/rational.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace rwdre {
namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size())
    throw std::invalid_argument("parse_rational: bad integer '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("parse_rational: empty input");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(trim(text.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rational(parse_int(trim(text.substr(0, slash))), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const bool negative = text.front() == '-';
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("parse_rational: too many decimals");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    if (!frac.empty() && (frac.front() == '-' || frac.front() == '+'))
      throw std::invalid_argument("parse_rational: bad decimal");
    Rational r(w < 0 ? -w : w);
    r += Rational(f, scale);
    return negative ? -r : r;
  }
  return Rational(parse_int(text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace rwdre
