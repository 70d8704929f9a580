#ifndef RANKWEIGHT_TESTS_SUPPORT_HPP
#define RANKWEIGHT_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankweight/aggregation.hpp"
#include "rankweight/ingestion.hpp"

namespace rankweight::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RANKWEIGHT_FIXTURE_DIR) / name;
}

inline std::vector<CountryAggregate> load_aggregates_fixture(const std::string& name) {
  std::ifstream in(fixture(name));
  return read_aggregates(in);
}

struct TopUniversityRow {
  std::size_t position;
  std::string name;
  std::string country;
  double weight;
};

inline std::vector<TopUniversityRow> load_top_universities() {
  std::ifstream in(fixture("top_universities.csv"));
  std::vector<TopUniversityRow> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    // position,name,country,w_u with at most one quoted name
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) { f.push_back(cur); cur.clear(); }
      else cur += c;
    }
    f.push_back(cur);
    out.push_back({std::stoul(f[0]), f[1], f[2], std::stod(f[3])});
  }
  return out;
}

// Smallest rank strictly above `after` whose reciprocal rounds to `weight`
// at six decimals.  Exhaustive scan: the oracle for the printed weights.
inline std::uint64_t invert_printed_weight(double weight, std::uint64_t after) {
  for (std::uint64_t r = after + 1; r < 10'000'000; ++r) {
    const double w = 1.0 / static_cast<double>(r);
    if (w < weight - 1e-6) break;
    if (std::llround(w * 1e6) == std::llround(weight * 1e6)) return r;
  }
  return 0;
}

// --- generators -------------------------------------------------------------

inline std::string random_code(std::mt19937_64& rng) {
  std::string code(2, 'A');
  code[0] = static_cast<char>('A' + rng() % 26);
  code[1] = static_cast<char>('A' + rng() % 26);
  return code;
}

inline std::string random_name(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "University", "Institute", "College", "of", "Technology", "Science",
      "Universität", "Université", "Санкт-Петербург", "東京", "جامعة",
      "São Paulo", "Zürich", "\"Quoted\"", "Comma, Inc", "Tab\tSep", "Ñandú"};
  std::string name;
  const auto words = 1 + rng() % 4;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) name += ' ';
    name += pieces[rng() % pieces.size()];
  }
  if (rng() % 10 == 0) name += " #" + std::to_string(rng() % 1000);
  return name;
}

inline std::vector<UniversityRecord> random_records(std::mt19937_64& rng, std::size_t n,
                                                    UniverseSize m, bool allow_unranked) {
  std::vector<UniversityRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Rank> rank;
    if (!allow_unranked || rng() % 5 != 0) rank = Rank(1 + rng() % m.value());
    out.push_back({random_name(rng) + " " + std::to_string(i), CountryCode(random_code(rng)),
                   rank});
  }
  return out;
}

inline std::vector<CountryAggregate> random_aggregates(std::mt19937_64& rng) {
  std::vector<CountryAggregate> out;
  std::vector<std::string> used;
  const auto count = 1 + rng() % 40;
  while (out.size() < count) {
    auto code = random_code(rng);
    if (std::find(used.begin(), used.end(), code) != used.end()) continue;
    used.push_back(code);
    const std::size_t n = 1 + rng() % 500;
    // Coarse weights so ties actually happen.
    const double w = static_cast<double>(rng() % 50) * 1e-4;
    out.push_back(make_country_aggregate(CountryCode(code), n, w));
  }
  return out;
}

}  // namespace rankweight::test

#endif  // RANKWEIGHT_TESTS_SUPPORT_HPP
