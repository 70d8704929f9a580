#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rankweight/aggregation.hpp"
#include "rankweight/errors.hpp"
#include "test_support.hpp"

using namespace rankweight;

namespace {
const UniverseSize kM{UniverseSize::kDefault};

UniversityRecord rec(std::string name, std::string code, std::uint64_t rank) {
  return {std::move(name), CountryCode(code), Rank(rank)};
}
}  // namespace

TEST_CASE("CountryCode validation") {
  CHECK(CountryCode("US").str() == "US");
  CHECK(CountryCode("XX").str() == "XX");
  CHECK_THROWS_AS(CountryCode("us"), DomainError);
  CHECK_THROWS_AS(CountryCode("USA"), DomainError);
  CHECK_THROWS_AS(CountryCode("U1"), DomainError);
  CHECK(CountryCode::parse("fi")->str() == "FI");
  CHECK_FALSE(CountryCode::parse("F").has_value());
  CHECK_FALSE(CountryCode::parse("F-").has_value());
}

TEST_CASE("aggregate_by_country singleton") {
  const std::vector<UniversityRecord> records{rec("MIT", "US", 1174)};
  const auto aggs = aggregate_by_country(records, kM);
  REQUIRE(aggs.size() == 1);
  CHECK(aggs[0].country.str() == "US");
  CHECK(aggs[0].n == 1);
  CHECK(aggs[0].w_c == 1.0 / 1174.0);
  CHECK(aggs[0].a_wc == aggs[0].w_c);
}

TEST_CASE("aggregate_by_country groups, counts and defaults unranked sites") {
  const std::vector<UniversityRecord> records{
      rec("A", "US", 10), rec("B", "FI", 20), rec("C", "US", 40),
      {"D", CountryCode("FI"), std::nullopt}};
  const auto aggs = aggregate_by_country(records, kM);
  REQUIRE(aggs.size() == 2);
  CHECK(aggs[0].country.str() == "FI");
  CHECK(aggs[0].n == 2);
  CHECK(aggs[0].w_c == doctest::Approx(1.0 / 20 + 1.0 / 30'000'000));
  CHECK(aggs[1].w_c == doctest::Approx(0.1 + 0.025));
  CHECK(aggs[1].a_wc == doctest::Approx(0.125 / 2));
  CHECK(aggregate_by_country({}, kM).empty());
}

TEST_CASE("tied country weights are broken by code") {
  const std::vector<UniversityRecord> records{rec("A", "SE", 500), rec("B", "DK", 500)};
  const auto aggs = aggregate_by_country(records, kM);
  CHECK(aggs[0].w_c == aggs[1].w_c);
  const auto ranking = rank_countries(aggs, RankingKey::kWeight);
  CHECK(ranking[0].aggregate.country.str() == "DK");
  CHECK(ranking[1].aggregate.country.str() == "SE");
}

TEST_CASE("average_country_weight") {
  const auto us = make_country_aggregate(CountryCode("US"), 3344, 0.03398612);
  CHECK(std::fabs(average_country_weight(us) * 1e6 - 10.16) < 0.005);
  const auto au = make_country_aggregate(CountryCode("AU"), 104, 0.00123761);
  CHECK(std::fabs(average_country_weight(au) * 1e6 - 11.90) < 0.01);
  const auto one = make_country_aggregate(CountryCode("QA"), 1, 0.25);
  CHECK(average_country_weight(one) == 0.25);

  CountryAggregate broken{CountryCode("ZZ"), 0, 0.1, 0.0};
  CHECK_THROWS_AS(average_country_weight(broken), DomainError);
  CHECK_THROWS_AS(make_country_aggregate(CountryCode("ZZ"), 0, 0.1), DomainError);
}

TEST_CASE("every published country average is reproduced") {
  const std::vector<double> printed{
      11.90, 10.47, 10.16, 8.93, 8.31, 6.24, 6.22, 5.55, 5.44, 5.39, 3.99, 3.78,
      3.62,  3.24,  3.04,  2.73, 2.54, 2.53, 2.51, 2.34, 2.25, 2.24, 2.21, 1.98,
      1.91,  1.84,  1.80,  1.71, 1.61, 1.55, 1.45, 0.97, 0.83, 0.64, 0.59};
  const auto aggs = test::load_aggregates_fixture("country_averages.csv");
  REQUIRE(aggs.size() == printed.size());
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    CAPTURE(aggs[i].country.str());
    CHECK(std::fabs(average_country_weight(aggs[i]) * 1e6 - printed[i]) < 0.005);
  }
  // The fixture lists rows in published order, which must be the ranking.
  const auto ranking = rank_countries(aggs, RankingKey::kAverage, kAverageMinUniversities);
  REQUIRE(ranking.size() == aggs.size());
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    CHECK(ranking[i].aggregate.country == aggs[i].country);
  }
}

TEST_CASE("rank_countries by weight on the published top-60 table") {
  const auto aggs = test::load_aggregates_fixture("country_weights.csv");
  const auto ranking = rank_countries(aggs, RankingKey::kWeight);
  REQUIRE(ranking.size() == 60);
  CHECK(ranking[0].aggregate.country.str() == "US");
  CHECK(ranking[1].aggregate.country.str() == "IN");
  CHECK(ranking[2].aggregate.country.str() == "BR");
  CHECK(ranking[18].aggregate.country.str() == "XX");
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    CHECK(ranking[i].position == i + 1);
    CHECK(ranking[i].aggregate.country == aggs[i].country);
  }
}

TEST_CASE("rank_countries by count and threshold") {
  const auto aggs = test::load_aggregates_fixture("country_weights.csv");
  const auto by_count = rank_countries(aggs, RankingKey::kCount);
  CHECK(by_count[0].aggregate.country.str() == "US");
  CHECK(by_count[1].aggregate.country.str() == "BR");
  CHECK(by_count[2].aggregate.country.str() == "IN");

  const auto filtered = rank_countries(aggs, RankingKey::kAverage, 100);
  for (const auto& r : filtered) CHECK(r.aggregate.n >= 100);
  CHECK(filtered[0].aggregate.country.str() == "AU");

  CHECK(rank_countries({}, RankingKey::kWeight).empty());
  const std::vector<CountryAggregate> single{make_country_aggregate(CountryCode("FI"), 3, 0.1)};
  CHECK(rank_countries(single, RankingKey::kAverage).at(0).position == 1);
}

TEST_CASE("rank_universities orders the published top 80 by inverted ranks") {
  const auto published = test::load_top_universities();
  REQUIRE(published.size() == 80);
  // Brute-force oracle: smallest increasing ranks reproducing each printed weight.
  std::vector<UniversityRecord> records;
  std::uint64_t previous = 0;
  for (const auto& row : published) {
    const auto rank = test::invert_printed_weight(row.weight, previous);
    REQUIRE(rank != 0);
    records.push_back({row.name, CountryCode(row.country), Rank(rank)});
    previous = rank;
  }
  CHECK(records[2].rank->value() == 1174);

  std::mt19937_64 rng(11);
  std::shuffle(records.begin(), records.end(), rng);
  const auto ranked = rank_universities(records, kM, WeightScheme::kHarmonic, 80);
  REQUIRE(ranked.size() == 80);
  for (std::size_t i = 0; i < 80; ++i) {
    CAPTURE(i);
    CHECK(ranked[i].position == published[i].position);
    CHECK(ranked[i].name == published[i].name);
    CHECK(std::llround(ranked[i].weight * 1e6) == std::llround(published[i].weight * 1e6));
  }
}

TEST_CASE("rank_universities tie-break and limits") {
  const std::vector<UniversityRecord> tied{rec("Charlie", "US", 5), rec("Alpha", "US", 5),
                                           rec("Bravo", "FI", 5)};
  const auto ranked = rank_universities(tied, kM, WeightScheme::kHarmonic, 10);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].name == "Alpha");
  CHECK(ranked[1].name == "Bravo");
  CHECK(ranked[2].name == "Charlie");

  const std::vector<UniversityRecord> two{rec("Low", "US", 10), rec("High", "US", 1)};
  // LINEAR: rank 1 -> ~1, rank 10 -> ~1 as well but strictly smaller.
  const auto top = rank_universities(two, kM, WeightScheme::kLinear, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].name == "High");
  CHECK_THROWS_AS(rank_universities(two, kM, WeightScheme::kLinear, 0), ParameterError);
}

TEST_CASE("country_share") {
  const auto us = make_country_aggregate(CountryCode("US"), 3344, 0.03398612);
  const double share = country_share(us, {0.0890988, 21485});
  CHECK(std::fabs(share - 38.14) < 0.05);
  CHECK(std::fabs(share - 38.6) > 0.4);  // the quoted 38.6 % does not follow
  const auto all = make_country_aggregate(CountryCode("US"), 1, 0.3);
  CHECK(country_share(all, {0.3, 1}) == 100.0);
  const auto none = make_country_aggregate(CountryCode("US"), 1, 0.0);
  CHECK(country_share(none, {0.3, 1}) == 0.0);
  CHECK_THROWS_AS(country_share(all, {0.0, 0}), DomainError);
}
