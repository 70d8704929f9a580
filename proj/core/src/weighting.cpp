#include "rankweight/weighting.hpp"

#include <cmath>
#include <string>

#include "rankweight/errors.hpp"

namespace rankweight {

UniverseSize::UniverseSize(std::uint64_t m) : m_(m) {
  if (m == 0) throw DomainError("universe size must be at least 1");
}

Rank::Rank(std::uint64_t value) : value_(value) {
  if (value == 0) throw DomainError("rank must be at least 1, got 0");
}

std::string_view to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kHarmonic:
      return "harmonic";
    case WeightScheme::kLinear:
      return "linear";
  }
  return "harmonic";
}

std::optional<WeightScheme> parse_weight_scheme(std::string_view text) {
  if (text == "harmonic" || text == "HARMONIC") return WeightScheme::kHarmonic;
  if (text == "linear" || text == "LINEAR") return WeightScheme::kLinear;
  return std::nullopt;
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double site_weight(Rank rank, UniverseSize m, WeightScheme scheme) {
  if (rank.value() > m.value()) {
    throw DomainError("rank " + std::to_string(rank.value()) +
                      " exceeds universe size " + std::to_string(m.value()));
  }
  const auto r = static_cast<double>(rank.value());
  switch (scheme) {
    case WeightScheme::kLinear:
      return 1.0 - r / static_cast<double>(m.value());
    case WeightScheme::kHarmonic:
      break;
  }
  return 1.0 / r;
}

AcademicWeight academic_weight(std::span<const double> weights) {
  CompensatedSum sum;
  for (double w : weights) sum.add(w);
  return {sum.value(), weights.size()};
}

namespace {

double harmonic_direct(std::uint64_t m) {
  // Smallest terms first keeps the running error small even before
  // compensation.
  CompensatedSum sum;
  for (std::uint64_t j = m; j >= 1; --j) sum.add(1.0 / static_cast<double>(j));
  return sum.value();
}

double harmonic_asymptotic(std::uint64_t m) {
  const auto x = static_cast<double>(m);
  return std::log(x) + kEulerGamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
}

}  // namespace

double harmonic_number(UniverseSize m, HarmonicMethod method) {
  switch (method) {
    case HarmonicMethod::kDirect:
      return harmonic_direct(m.value());
    case HarmonicMethod::kAsymptotic:
      return harmonic_asymptotic(m.value());
    case HarmonicMethod::kAuto:
      break;
  }
  return m.value() <= kAutoDirectLimit ? harmonic_direct(m.value())
                                       : harmonic_asymptotic(m.value());
}

double percentage_academic_traffic(double w_at, UniverseSize m,
                                   HarmonicMethod method) {
  return w_at / harmonic_number(m, method) * 100.0;
}

double over_representation_ratio(double p_at, std::uint64_t k, UniverseSize m) {
  if (k == 0) throw DomainError("over-representation ratio needs k >= 1");
  if (k > m.value()) {
    throw DomainError("site count " + std::to_string(k) +
                      " exceeds universe size " + std::to_string(m.value()));
  }
  const double count_share =
      100.0 * static_cast<double>(k) / static_cast<double>(m.value());
  return p_at / count_share;
}

}  // namespace rankweight
