#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rankweight/errors.hpp"
#include "rankweight/ingestion.hpp"
#include "test_support.hpp"

using namespace rankweight;

namespace {
const UniverseSize kM{UniverseSize::kDefault};

ParsedDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

IngestResult ingest_text(const std::string& text, UniverseSize m = kM) {
  std::istringstream in(text);
  return ingest(in, m);
}

DatasetRow row(std::string name, std::string country, std::string rank) {
  return {2, std::move(name), std::move(country), std::move(rank)};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << body;
  return path;
}
}  // namespace

TEST_CASE("parse_dataset well-formed and unranked lines") {
  auto parsed = parse("name,country_code,global_rank\nMIT,US,1174\n");
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.rows[0].name == "MIT");
  CHECK(parsed.rows[0].country == "US");
  CHECK(parsed.rows[0].rank_field == "1174");
  CHECK(parsed.rows[0].line == 2);
  CHECK(parsed.errors.empty());

  parsed = parse("name,country_code,global_rank\nSome College,FI,\n");
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.rows[0].rank_field.empty());
}

TEST_CASE("parse_dataset header errors are fatal") {
  CHECK_THROWS_AS(parse("MIT,US,1174\n"), FormatError);
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("name,country,rank\n"), FormatError);
}

TEST_CASE("parse_dataset handles quoting, CRLF and BOM") {
  const auto parsed = parse(
      "\xEF\xBB\xBFname,country_code,global_rank\r\n"
      "\"University of Minnesota, Rochester\",US,2000\r\n"
      "\"The \"\"Quoted\"\" College\",GB,3\r\n"
      "\"Multi\nLine\",FI,\r\n");
  REQUIRE(parsed.rows.size() == 3);
  CHECK(parsed.rows[0].name == "University of Minnesota, Rochester");
  CHECK(parsed.rows[1].name == "The \"Quoted\" College");
  CHECK(parsed.rows[2].name == "Multi\nLine");
  CHECK(parsed.rows[2].line == 4);
}

TEST_CASE("parse_dataset reports malformed lines with their numbers") {
  const auto parsed = parse(
      "name,country_code,global_rank\n"
      "A,US,1\n"
      "B,US\n"
      "\n"
      "C,US,3,extra\n"
      "\"Open quote,US,4\n");
  CHECK(parsed.rows.size() == 1);
  REQUIRE(parsed.errors.size() == 3);
  CHECK(parsed.errors[0].line == 3);
  CHECK(parsed.errors[1].line == 5);
  CHECK(parsed.errors[2].line == 6);
}

TEST_CASE("normalize_row default-rank rule and validation") {
  auto outcome = normalize_row(row("Some College", "FI", ""), kM);
  REQUIRE(std::holds_alternative<NormalizedRow>(outcome));
  auto& ok = std::get<NormalizedRow>(outcome);
  CHECK(ok.record.rank->value() == 30'000'000);
  CHECK(ok.defaulted_rank);

  outcome = normalize_row(row("MIT", "us", "1174"), kM);
  REQUIRE(std::holds_alternative<NormalizedRow>(outcome));
  CHECK(std::get<NormalizedRow>(outcome).record.country.str() == "US");
  CHECK(std::get<NormalizedRow>(outcome).record.rank->value() == 1174);
  CHECK_FALSE(std::get<NormalizedRow>(outcome).defaulted_rank);

  outcome = normalize_row(row("X", "USA", "5"), kM);
  REQUIRE(std::holds_alternative<Rejection>(outcome));
  CHECK(std::get<Rejection>(outcome).reason.find("two letters") != std::string::npos);

  for (const auto& bad : {row("A", "US", "abc"), row("A", "US", "0"), row("A", "US", "-3"),
                          row("A", "US", "30000001"), row("  ", "US", "5"),
                          row("A", "U1", "5"), row("A", "US", "1.5")}) {
    CAPTURE(bad.rank_field);
    CHECK(std::holds_alternative<Rejection>(normalize_row(bad, kM)));
  }
  CHECK(std::holds_alternative<NormalizedRow>(normalize_row(row("A", "xx", "5"), kM)));
}

TEST_CASE("dedupe keeps the best rank") {
  const std::vector<UniversityRecord> two{{"MIT", CountryCode("US"), Rank(2000)},
                                          {"MIT", CountryCode("US"), Rank(1174)}};
  auto result = dedupe(two);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].rank->value() == 1174);
  CHECK(result.deduplicated == 1);

  const std::vector<UniversityRecord> distinct{{"MIT", CountryCode("US"), Rank(1)},
                                               {"MIT", CountryCode("GB"), Rank(2)},
                                               {"Caltech", CountryCode("US"), Rank(3)}};
  result = dedupe(distinct);
  CHECK(result.deduplicated == 0);
  REQUIRE(result.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.records[i].name == distinct[i].name);
    CHECK(result.records[i].country == distinct[i].country);
  }

  const std::vector<UniversityRecord> triple(3, {"Same", CountryCode("FI"), Rank(kM.value())});
  result = dedupe(triple);
  CHECK(result.records.size() == 1);
  CHECK(result.deduplicated == 2);
}

TEST_CASE("ingest report partitions the input rows") {
  const auto result = ingest_text(
      "name,country_code,global_rank\n"
      "MIT,US,2000\n"
      "MIT,us,1174\n"
      "Some College,FI,\n"
      "Bad,USA,5\n"
      "Short,US\n"
      "Zero,US,0\n"
      "Other,GB,10\n");
  CHECK(result.report.accepted == 3);
  CHECK(result.report.deduplicated == 1);
  CHECK(result.report.rejected.size() == 3);
  CHECK(result.report.total_rows() == 7);
  CHECK(result.report.defaulted_rank == 1);
  CHECK(result.report.rejected[0].line == 5);
  CHECK(result.report.rejected[1].line == 6);
  CHECK(result.report.rejected[2].line == 7);
  for (const auto& r : result.records) CHECK(r.rank.has_value());
}

TEST_CASE("defaulted_rank counts only surviving defaulted records") {
  const auto result = ingest_text(
      "name,country_code,global_rank\n"
      "A,US,\n"
      "A,US,50\n"
      "B,US,\n"
      "B,US,\n");
  CHECK(result.report.accepted == 2);
  CHECK(result.report.defaulted_rank == 1);
}

TEST_CASE("ingest is deterministic") {
  const std::string text =
      "name,country_code,global_rank\nA,US,5\nB,FI,\nA,US,3\nC,XX,9\n";
  const auto a = ingest_text(text);
  const auto b = ingest_text(text);
  CHECK(a.records == b.records);
  CHECK(a.report.accepted == b.report.accepted);
}

TEST_CASE("ingest_file missing path is an I/O error") {
  CHECK_THROWS_AS(ingest_file("/nonexistent/rankweight/data.csv", kM), std::system_error);
}

TEST_CASE("read_aggregates") {
  std::istringstream good("country_code,universities,weight\nUS,3344,0.03398612\nAU,104,0.00123761\n");
  const auto aggs = read_aggregates(good);
  REQUIRE(aggs.size() == 2);
  CHECK(aggs[1].country.str() == "AU");
  CHECK(aggs[1].n == 104);

  std::istringstream dup("country_code,universities,weight\nUS,1,0.1\nUS,2,0.2\n");
  CHECK_THROWS_AS(read_aggregates(dup), FormatError);
  std::istringstream bad("country_code,universities,weight\nUS,0,0.1\n");
  try {
    read_aggregates(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream header("a,b,c\n");
  CHECK_THROWS_AS(read_aggregates(header), FormatError);
}

TEST_CASE("fixture ranking provider") {
  const auto path = temp_file("rankweight_provider.csv", "site,global_rank\nmit.edu,1174\nox.ac.uk,2500\n");
  const Timestamp fixed{std::chrono::seconds(1'389'000'000)};
  FixtureRankingProvider provider(path, [fixed] { return fixed; });

  const std::vector<std::string> sites{"mit.edu"};
  auto responses = fetch_ranks(sites, provider);
  REQUIRE(responses.size() == 1);
  CHECK(responses[0].site == "mit.edu");
  REQUIRE(responses[0].rank.has_value());
  CHECK(responses[0].rank->value() == 1174);
  CHECK(responses[0].retrieved_at == fixed);

  const std::vector<std::string> mixed{"nowhere.example", "ox.ac.uk"};
  responses = fetch_ranks(mixed, provider);
  REQUIRE(responses.size() == 2);
  CHECK(responses[0].site == "nowhere.example");
  CHECK_FALSE(responses[0].rank.has_value());
  CHECK(responses[1].rank->value() == 2500);
  std::filesystem::remove(path);
}

TEST_CASE("unreadable fixture raises a provider error naming the provider") {
  FixtureRankingProvider provider("/nonexistent/rankweight/ranks.csv");
  const std::vector<std::string> sites{"mit.edu"};
  try {
    fetch_ranks(sites, provider);
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(std::string(e.what()).find("fixture:") != std::string::npos);
  }
}
