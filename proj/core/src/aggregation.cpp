#include "rankweight/aggregation.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "rankweight/errors.hpp"

namespace rankweight {

CountryCode::CountryCode(std::string_view code) {
  const bool ok = code.size() == 2 &&
                  std::all_of(code.begin(), code.end(),
                              [](char c) { return c >= 'A' && c <= 'Z'; });
  if (!ok) {
    throw DomainError("country code must be two uppercase letters, got '" +
                      std::string(code) + "'");
  }
  code_[0] = code[0];
  code_[1] = code[1];
}

std::optional<CountryCode> CountryCode::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  std::string upper(text);
  for (char& c : upper) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (c < 'A' || c > 'Z') return std::nullopt;
  }
  return CountryCode(upper);
}

Rank effective_rank(const UniversityRecord& record, UniverseSize m) {
  return record.rank.value_or(Rank(m.value()));
}

double record_weight(const UniversityRecord& record, UniverseSize m,
                     WeightScheme scheme) {
  return site_weight(effective_rank(record, m), m, scheme);
}

CountryAggregate make_country_aggregate(CountryCode country, std::size_t n,
                                        double w_c) {
  if (n == 0) throw DomainError("country aggregate needs n >= 1");
  if (!(w_c >= 0.0)) throw DomainError("country weight must be non-negative");
  return {country, n, w_c, w_c / static_cast<double>(n)};
}

std::vector<CountryAggregate> aggregate_by_country(
    std::span<const UniversityRecord> records, UniverseSize m,
    WeightScheme scheme) {
  struct Accumulator {
    std::size_t n = 0;
    CompensatedSum sum;
  };
  // Input order within a country fixes the reduction order.
  std::map<CountryCode, Accumulator> groups;
  for (const auto& record : records) {
    auto& acc = groups[record.country];
    ++acc.n;
    acc.sum.add(record_weight(record, m, scheme));
  }

  std::vector<CountryAggregate> out;
  out.reserve(groups.size());
  for (const auto& [country, acc] : groups) {
    out.push_back(make_country_aggregate(country, acc.n, acc.sum.value()));
  }
  return out;
}

double average_country_weight(const CountryAggregate& agg) {
  if (agg.n == 0) throw DomainError("average weight of a country with n = 0");
  return agg.w_c / static_cast<double>(agg.n);
}

std::string_view to_string(RankingKey key) {
  switch (key) {
    case RankingKey::kWeight:
      return "weight";
    case RankingKey::kCount:
      return "count";
    case RankingKey::kAverage:
      return "average";
  }
  return "weight";
}

std::optional<RankingKey> parse_ranking_key(std::string_view text) {
  if (text == "weight") return RankingKey::kWeight;
  if (text == "count") return RankingKey::kCount;
  if (text == "average") return RankingKey::kAverage;
  return std::nullopt;
}

double ranking_key_value(const CountryAggregate& agg, RankingKey key) {
  switch (key) {
    case RankingKey::kWeight:
      return agg.w_c;
    case RankingKey::kCount:
      return static_cast<double>(agg.n);
    case RankingKey::kAverage:
      return average_country_weight(agg);
  }
  return agg.w_c;
}

CountryRanking rank_countries(std::span<const CountryAggregate> aggs,
                              RankingKey key, std::size_t min_universities) {
  std::vector<CountryAggregate> kept;
  kept.reserve(aggs.size());
  std::copy_if(aggs.begin(), aggs.end(), std::back_inserter(kept),
               [&](const CountryAggregate& a) { return a.n >= min_universities; });

  std::sort(kept.begin(), kept.end(),
            [key](const CountryAggregate& a, const CountryAggregate& b) {
              const double ka = ranking_key_value(a, key);
              const double kb = ranking_key_value(b, key);
              if (ka != kb) return ka > kb;
              return a.country < b.country;
            });

  CountryRanking ranking;
  ranking.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    ranking.push_back({i + 1, kept[i]});
  }
  return ranking;
}

std::vector<RankedUniversity> rank_universities(
    std::span<const UniversityRecord> records, UniverseSize m,
    WeightScheme scheme, std::size_t top_n) {
  if (top_n == 0) throw ParameterError("top_n must be at least 1");

  std::vector<RankedUniversity> all;
  all.reserve(records.size());
  for (const auto& record : records) {
    const Rank rank = effective_rank(record, m);
    all.push_back({0, record.name, record.country, rank,
                   site_weight(rank, m, scheme)});
  }

  const std::size_t n = std::min(top_n, all.size());
  auto by_weight = [](const RankedUniversity& a, const RankedUniversity& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.name != b.name) return a.name < b.name;
    return a.country < b.country;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n),
                    all.end(), by_weight);
  all.erase(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
  for (std::size_t i = 0; i < n; ++i) all[i].position = i + 1;
  return all;
}

double country_share(const CountryAggregate& agg, const AcademicWeight& w_at) {
  if (!(w_at.w_at > 0.0)) {
    throw DomainError("country share needs a positive academic weight");
  }
  return 100.0 * agg.w_c / w_at.w_at;
}

}  // namespace rankweight
