#ifndef RANKWEIGHT_WEIGHTING_HPP
#define RANKWEIGHT_WEIGHTING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace rankweight {

// Number of ranked sites in the traffic universe.
class UniverseSize {
 public:
  static constexpr std::uint64_t kDefault = 30'000'000;

  constexpr UniverseSize() = default;
  // Throws DomainError when m == 0.
  explicit UniverseSize(std::uint64_t m);

  constexpr std::uint64_t value() const noexcept { return m_; }
  friend constexpr bool operator==(UniverseSize, UniverseSize) = default;

 private:
  std::uint64_t m_ = kDefault;
};

// Global traffic rank, 1 = most visited.  The upper bound depends on the
// universe and is checked where a UniverseSize is available.
class Rank {
 public:
  // Throws DomainError when value == 0.
  explicit Rank(std::uint64_t value);

  constexpr std::uint64_t value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Rank, Rank) = default;

 private:
  std::uint64_t value_;
};

enum class WeightScheme {
  kHarmonic,  // w = 1 / rank
  kLinear,    // w = 1 - rank / m
};

std::string_view to_string(WeightScheme scheme);
std::optional<WeightScheme> parse_weight_scheme(std::string_view text);

struct AcademicWeight {
  double w_at = 0.0;
  std::size_t k = 0;
};

enum class HarmonicMethod {
  kDirect,      // compensated summation of all m terms
  kAsymptotic,  // ln m + gamma + 1/(2m) - 1/(12 m^2)
  kAuto,        // direct up to kAutoDirectLimit, asymptotic above
};

inline constexpr double kEulerGamma = 0.5772156649015329;
inline constexpr std::uint64_t kAutoDirectLimit = 1'000'000;

// Throws DomainError if rank > m.
double site_weight(Rank rank, UniverseSize m,
                   WeightScheme scheme = WeightScheme::kHarmonic);

// Neumaier-compensated sum of the weights.
AcademicWeight academic_weight(std::span<const double> weights);

double harmonic_number(UniverseSize m,
                       HarmonicMethod method = HarmonicMethod::kAuto);

// (w_at / H_m) * 100.
double percentage_academic_traffic(double w_at, UniverseSize m,
                                   HarmonicMethod method = HarmonicMethod::kAuto);
inline double percentage_academic_traffic(
    const AcademicWeight& w, UniverseSize m,
    HarmonicMethod method = HarmonicMethod::kAuto) {
  return percentage_academic_traffic(w.w_at, m, method);
}

// Share of traffic divided by share of sites: p_at / (100 k / m).
// Throws DomainError when k == 0 or k > m.
double over_representation_ratio(double p_at, std::uint64_t k, UniverseSize m);

// Running compensated sum; the accumulator behind every sum in the library.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace rankweight

#endif  // RANKWEIGHT_WEIGHTING_HPP
