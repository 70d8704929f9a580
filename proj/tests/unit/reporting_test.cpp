#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "rankweight/errors.hpp"
#include "rankweight/ingestion.hpp"
#include "rankweight/reporting.hpp"
#include "test_support.hpp"

using namespace rankweight;

namespace {
const UniverseSize kM{UniverseSize::kDefault};

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}
}  // namespace

TEST_CASE("format_fixed rounds half away from zero on the decimal form") {
  CHECK(format_fixed(10.165, 2) == "10.17");
  CHECK(format_fixed(0.125, 2) == "0.13");
  CHECK(format_fixed(-0.125, 2) == "-0.13");
  CHECK(format_fixed(2.5, 0) == "3");
  CHECK(format_fixed(0.03398612, 8) == "0.03398612");
  CHECK(format_fixed(9.999, 2) == "10.00");
  CHECK(format_fixed(0.0, 3) == "0.000");
  CHECK(format_fixed(-0.0001, 2) == "0.00");
  CHECK(format_fixed(1.0 / 1174.0, 6) == "0.000852");
  CHECK(format_fixed(1e-9, 8) == "0.00000000");
  CHECK(format_fixed(123456789.0, 1) == "123456789.0");
}

TEST_CASE("format_shortest") {
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(50e6) == "5e+07");
  CHECK(format_shortest(1174) == "1174");
  CHECK(std::stod(format_shortest(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("ReportTable rejects ragged rows") {
  ReportTable t;
  t.columns = {"a", "b"};
  t.add_row({std::string("x"), std::int64_t{1}});
  CHECK_THROWS_AS(t.add_row({std::string("x")}), ParameterError);
}

TEST_CASE("country average row for the US") {
  const std::vector<CountryAggregate> aggs{make_country_aggregate(CountryCode("US"), 3344, 0.03398612)};
  const auto csv = emit_table(rank_countries(aggs, RankingKey::kAverage), TableStyle::kCountryAverage,
                              TableFormat::kCsv);
  CHECK(csv.find(",3344,10.16\n") != std::string::npos);
  CHECK(csv.find("United States") != std::string::npos);
  CHECK(csv.find("0.03398612") != std::string::npos);
}

TEST_CASE("single country weight table as CSV") {
  const std::vector<CountryAggregate> aggs{make_country_aggregate(CountryCode("FI"), 12, 0.000123456789)};
  const auto csv = emit_table(rank_countries(aggs, RankingKey::kWeight), TableStyle::kCountryWeight,
                              TableFormat::kCsv);
  CHECK(count_lines(csv) == 2);
  CHECK(csv.rfind("Rank,Code,Country Name,Number of Universities,Weight of Country (W_c)\n", 0) == 0);
  CHECK(csv.find("1,FI,Finland,12,0.00012346\n") != std::string::npos);
}

TEST_CASE("empty ranking gives a header-only table") {
  const auto csv = emit_table(CountryRanking{}, TableStyle::kUniversityCount, TableFormat::kCsv);
  CHECK(count_lines(csv) == 1);
  const auto md = emit_table(CountryRanking{}, TableStyle::kCountryWeight, TableFormat::kMarkdown);
  CHECK(md.find("| Rank |") != std::string::npos);
}

TEST_CASE("published country table as Markdown keeps its 60 rows in order") {
  const auto aggs = test::load_aggregates_fixture("country_weights.csv");
  const auto md = emit_table(rank_countries(aggs, RankingKey::kWeight), TableStyle::kCountryWeight,
                             TableFormat::kMarkdown);
  std::istringstream in(md);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.rfind("| ", 0) == 0 && line.find("---") == std::string::npos &&
        line.find("| Rank |") == std::string::npos) {
      rows.push_back(line);
    }
  }
  REQUIRE(rows.size() == 60);
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    CAPTURE(i);
    const std::string prefix = "| " + std::to_string(i + 1) + " | " + std::string(aggs[i].country.str()) + " |";
    CHECK(rows[i].rfind(prefix, 0) == 0);
  }
  CHECK(rows[0].find("0.03398612") != std::string::npos);
}

TEST_CASE("JSON table layout") {
  const auto aggs = test::load_aggregates_fixture("country_averages.csv");
  const auto text = emit_table(rank_countries(aggs, RankingKey::kAverage, 100),
                               TableStyle::kCountryAverage, TableFormat::kJson);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["title"].is_string());
  REQUIRE(doc["columns"].size() == 6);
  REQUIRE(doc["rows"].size() == 35);
  CHECK(doc["rows"][0][1] == "AU");
  CHECK(doc["rows"][0][0] == 1);
  CHECK(doc["rows"][0][5].get<double>() == 11.9);
  CHECK(doc["rows"][2][5].get<double>() == 10.16);
}

TEST_CASE("university table") {
  const std::vector<UniversityRecord> records{{"Massachusetts Institute of Technology", CountryCode("US"), Rank(1174)},
                                              {"University of Minnesota, Rochester", CountryCode("US"), Rank(2000)}};
  const auto ranked = rank_universities(records, kM, WeightScheme::kHarmonic, 80);
  const auto csv = emit_table(ranked, TableFormat::kCsv);
  CHECK(csv.find("1,Massachusetts Institute of Technology,US,1174,0.000852\n") != std::string::npos);
  CHECK(csv.find("2,\"University of Minnesota, Rochester\",US,2000,0.000500\n") != std::string::npos);
}

TEST_CASE("emit_dataset is canonical and round-trips") {
  const std::vector<UniversityRecord> records{
      {"Zürich Institut", CountryCode("CH"), Rank(40)},
      {"東京大学", CountryCode("JP"), Rank(30)},
      {"\"Quoted\", College", CountryCode("US"), Rank(kM.value())},
      {"Alpha", CountryCode("CH"), Rank(7)},
  };
  const auto text = emit_dataset(records);
  CHECK(text.rfind("name,country_code,global_rank\n", 0) == 0);
  CHECK(text.find("Alpha,CH,7\nZürich Institut,CH,40\n") != std::string::npos);
  CHECK(text.find("\"\"\"Quoted\"\", College\",US,30000000\n") != std::string::npos);

  std::istringstream in(text);
  const auto back = ingest(in, kM);
  CHECK(back.report.rejected.empty());
  REQUIRE(back.records.size() == 4);
  CHECK(back.records[0].name == "Alpha");
  CHECK(back.records[1].name == "Zürich Institut");
  CHECK(back.records[2].name == "東京大学");
  CHECK(emit_dataset(back.records) == text);
}

TEST_CASE("emit_dataset leaves unranked records blank") {
  const std::vector<UniversityRecord> records{{"Some College", CountryCode("FI"), std::nullopt}};
  CHECK(emit_dataset(records) == "name,country_code,global_rank\nSome College,FI,\n");
}
