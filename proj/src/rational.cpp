#include "ergolab/rational.hpp"

#include "ergolab/error.hpp"

#include <cctype>

namespace ergolab {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DivergentMass: return "DivergentMass";
    case ErrorCode::EmptyRecipe: return "EmptyRecipe";
    case ErrorCode::StageOrder: return "StageOrder";
    case ErrorCode::ShiftTooLarge: return "ShiftTooLarge";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::OverlapViolation: return "OverlapViolation";
    case ErrorCode::BadMarginals: return "BadMarginals";
    case ErrorCode::UndefinedOrbit: return "UndefinedOrbit";
    case ErrorCode::ZeroMeanViolation: return "ZeroMeanViolation";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  num = trim(num);
  den = trim(den);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-') {
    fail(ErrorCode::ConfigError, "not a rational: '" + std::string(text) + "'");
  }
  if (num.front() == '+') num.remove_prefix(1);
  if (den.front() == '+') den.remove_prefix(1);
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) fail(ErrorCode::ConfigError, "zero denominator: '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational dyadic(unsigned exponent) {
  mpz_class den = 1;
  den <<= exponent;
  return Rational(mpz_class(1), den);
}

}  // namespace ergolab
