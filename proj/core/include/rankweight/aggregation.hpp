#ifndef RANKWEIGHT_AGGREGATION_HPP
#define RANKWEIGHT_AGGREGATION_HPP

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankweight/weighting.hpp"

namespace rankweight {

// Two uppercase ASCII letters.  "XX" stands for the international category
// (institutions not attached to one country).
class CountryCode {
 public:
  static constexpr std::string_view kInternational = "XX";

  // Throws DomainError unless `code` is exactly two uppercase letters.
  explicit CountryCode(std::string_view code);

  // Uppercases first; nullopt when the result is not a valid code.
  static std::optional<CountryCode> parse(std::string_view text);

  std::string_view str() const noexcept { return {code_, 2}; }
  friend auto operator<=>(const CountryCode& a, const CountryCode& b) {
    return a.str() <=> b.str();
  }
  friend bool operator==(const CountryCode& a, const CountryCode& b) {
    return a.str() == b.str();
  }

 private:
  char code_[2];
};

struct UniversityRecord {
  std::string name;
  CountryCode country;
  std::optional<Rank> rank;  // nullopt: unranked

  friend bool operator==(const UniversityRecord&,
                         const UniversityRecord&) = default;
};

// Rank with the default-rank rule applied: unranked sites sit at rank m.
Rank effective_rank(const UniversityRecord& record, UniverseSize m);

double record_weight(const UniversityRecord& record, UniverseSize m,
                     WeightScheme scheme);

struct CountryAggregate {
  CountryCode country;
  std::size_t n = 0;
  double w_c = 0.0;
  double a_wc = 0.0;
};

// Builds an aggregate from published totals; a_wc is derived.
// Throws DomainError when n == 0 or w_c < 0.
CountryAggregate make_country_aggregate(CountryCode country, std::size_t n,
                                        double w_c);

// One aggregate per distinct country, ordered by country code.
std::vector<CountryAggregate> aggregate_by_country(
    std::span<const UniversityRecord> records, UniverseSize m,
    WeightScheme scheme = WeightScheme::kHarmonic);

// Throws DomainError when n == 0.
double average_country_weight(const CountryAggregate& agg);

enum class RankingKey { kWeight, kCount, kAverage };

std::string_view to_string(RankingKey key);
std::optional<RankingKey> parse_ranking_key(std::string_view text);

inline constexpr std::size_t kAverageMinUniversities = 100;

struct RankedCountry {
  std::size_t position = 0;
  CountryAggregate aggregate;
};

using CountryRanking = std::vector<RankedCountry>;

double ranking_key_value(const CountryAggregate& agg, RankingKey key);

// Sorted non-increasing on `key`, ties by ascending country code.  Countries
// with fewer than `min_universities` sites are left out.
CountryRanking rank_countries(std::span<const CountryAggregate> aggs,
                              RankingKey key,
                              std::size_t min_universities = 0);

struct RankedUniversity {
  std::size_t position = 0;
  std::string name;
  CountryCode country;
  Rank rank;
  double weight = 0.0;
};

// Top `top_n` records by descending weight, ties by ascending name.
// Throws ParameterError when top_n == 0.
std::vector<RankedUniversity> rank_universities(
    std::span<const UniversityRecord> records, UniverseSize m,
    WeightScheme scheme, std::size_t top_n);

// 100 * w_c / w_at.  Throws DomainError when w_at <= 0.
double country_share(const CountryAggregate& agg, const AcademicWeight& w_at);

}  // namespace rankweight

#endif  // RANKWEIGHT_AGGREGATION_HPP
