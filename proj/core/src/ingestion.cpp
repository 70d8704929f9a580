#include "rankweight/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>
#include <unordered_map>

#include "rankweight/csv.hpp"
#include "rankweight/errors.hpp"

namespace rankweight {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

bool is_blank(const csv::Record& r) {
  return r.error.empty() && r.fields.size() == 1 && r.fields[0].empty();
}

std::optional<std::uint64_t> parse_unsigned(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

ParsedDataset parse_dataset(std::istream& in) {
  csv::Reader reader(in);
  std::optional<csv::Record> header;
  do {
    header = reader.next();
  } while (header && is_blank(*header));
  if (!header) throw FormatError("empty input: missing header row");
  if (!header->error.empty()) {
    throw FormatError("malformed header row: " + header->error);
  }
  std::vector<std::string> columns;
  for (const auto& f : header->fields) columns.emplace_back(trim(f));
  if (columns != std::vector<std::string>{"name", "country_code", "global_rank"}) {
    throw FormatError("expected header '" + std::string(kDatasetHeader) +
                      "', got '" + csv::join_row(header->fields) + "'");
  }

  ParsedDataset out;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    if (!record->error.empty()) {
      out.errors.push_back({record->line, record->error});
      continue;
    }
    if (record->fields.size() != 3) {
      out.errors.push_back({record->line, "expected 3 fields, got " +
                                              std::to_string(record->fields.size())});
      continue;
    }
    out.rows.push_back({record->line, std::move(record->fields[0]),
                        std::move(record->fields[1]),
                        std::move(record->fields[2])});
  }
  return out;
}

std::variant<NormalizedRow, Rejection> normalize_row(const DatasetRow& row,
                                                     UniverseSize m) {
  const auto reject = [&](std::string reason) {
    return Rejection{row.line, std::move(reason)};
  };

  const std::string_view name = trim(row.name);
  if (name.empty()) return reject("empty name");

  const std::string_view country_text = trim(row.country);
  const auto country = CountryCode::parse(country_text);
  if (!country) {
    return reject("country code '" + std::string(country_text) +
                  "' is not two letters");
  }

  const std::string_view rank_text = trim(row.rank_field);
  if (rank_text.empty()) {
    return NormalizedRow{{std::string(name), *country, Rank(m.value())}, true};
  }
  const auto value = parse_unsigned(rank_text);
  if (!value) return reject("rank '" + std::string(rank_text) + "' is not a positive integer");
  if (*value == 0) return reject("rank must be at least 1");
  if (*value > m.value()) {
    return reject("rank " + std::to_string(*value) + " exceeds universe size " +
                  std::to_string(m.value()));
  }
  return NormalizedRow{{std::string(name), *country, Rank(*value)}, false};
}

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<std::string, std::string>& k) const {
    return std::hash<std::string>{}(k.first) * 31 + std::hash<std::string>{}(k.second);
  }
};

bool better_rank(const std::optional<Rank>& a, const std::optional<Rank>& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

}  // namespace

DedupeResult dedupe(std::span<const UniversityRecord> records) {
  DedupeResult out;
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, KeyHash>
      first_seen;
  for (const auto& record : records) {
    auto key = std::make_pair(record.name, std::string(record.country.str()));
    auto [it, inserted] = first_seen.try_emplace(std::move(key), out.records.size());
    if (inserted) {
      out.records.push_back(record);
      continue;
    }
    ++out.deduplicated;
    auto& kept = out.records[it->second];
    if (better_rank(record.rank, kept.rank)) kept.rank = record.rank;
  }
  return out;
}

IngestResult ingest(std::istream& in, UniverseSize m) {
  ParsedDataset parsed = parse_dataset(in);

  IngestResult result;
  result.report.rejected = std::move(parsed.errors);

  std::vector<UniversityRecord> normalized;
  std::vector<bool> defaulted;
  normalized.reserve(parsed.rows.size());
  for (const auto& row : parsed.rows) {
    auto outcome = normalize_row(row, m);
    if (auto* rejection = std::get_if<Rejection>(&outcome)) {
      result.report.rejected.push_back({rejection->line, rejection->reason});
    } else {
      auto& ok = std::get<NormalizedRow>(outcome);
      normalized.push_back(std::move(ok.record));
      defaulted.push_back(ok.defaulted_rank);
    }
  }
  std::stable_sort(result.report.rejected.begin(), result.report.rejected.end(),
                   [](const LineError& a, const LineError& b) { return a.line < b.line; });

  // Mirrors dedupe(): a later duplicate only wins with a strictly better rank.
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, KeyHash> winner;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    auto key = std::make_pair(normalized[i].name, std::string(normalized[i].country.str()));
    auto [it, inserted] = winner.try_emplace(std::move(key), i);
    if (!inserted && better_rank(normalized[i].rank, normalized[it->second].rank)) {
      it->second = i;
    }
  }
  for (const auto& [key, index] : winner) {
    if (defaulted[index]) ++result.report.defaulted_rank;
  }

  DedupeResult deduped = dedupe(normalized);
  result.records = std::move(deduped.records);
  result.report.deduplicated = deduped.deduplicated;
  result.report.accepted = result.records.size();
  return result;
}

IngestResult ingest_file(const std::filesystem::path& path, UniverseSize m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            "cannot open " + path.string());
  }
  return ingest(in, m);
}

std::vector<CountryAggregate> read_aggregates(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  std::vector<std::string> columns;
  if (header && header->error.empty()) {
    for (const auto& f : header->fields) columns.emplace_back(trim(f));
  }
  if (columns != std::vector<std::string>{"country_code", "universities", "weight"}) {
    throw FormatError("expected header 'country_code,universities,weight'");
  }

  std::vector<CountryAggregate> out;
  std::vector<std::string> seen;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    const auto fail = [&](const std::string& why) {
      return FormatError("line " + std::to_string(record->line) + ": " + why);
    };
    if (!record->error.empty()) throw fail(record->error);
    if (record->fields.size() != 3) throw fail("expected 3 fields");
    const auto code = CountryCode::parse(trim(record->fields[0]));
    if (!code) throw fail("bad country code '" + record->fields[0] + "'");
    const auto n = parse_unsigned(record->fields[1]);
    if (!n || *n == 0) throw fail("universities must be a positive integer");
    const std::string weight_text(trim(record->fields[2]));
    double w = 0.0;
    const auto [ptr, ec] =
        std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), w);
    if (weight_text.empty() || ec != std::errc() ||
        ptr != weight_text.data() + weight_text.size() || !(w >= 0.0)) {
      throw fail("weight must be a non-negative number");
    }
    if (std::find(seen.begin(), seen.end(), code->str()) != seen.end()) {
      throw fail("duplicate country " + std::string(code->str()));
    }
    seen.emplace_back(code->str());
    out.push_back(make_country_aggregate(*code, *n, w));
  }
  return out;
}

Timestamp RankingProvider::now() const {
  return std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
}

FixtureRankingProvider::FixtureRankingProvider(std::filesystem::path path,
                                               Clock clock)
    : path_(std::move(path)), clock_(std::move(clock)) {}

std::string FixtureRankingProvider::name() const {
  return "fixture:" + path_.string();
}

Timestamp FixtureRankingProvider::now() const {
  return clock_ ? clock_() : RankingProvider::now();
}

void FixtureRankingProvider::load() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw ProviderError(name(), "cannot read fixture file");

  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || !header->error.empty() || header->fields.size() != 2 ||
      trim(header->fields[0]) != "site" || trim(header->fields[1]) != "global_rank") {
    throw ProviderError(name(), "expected header 'site,global_rank'");
  }
  std::map<std::string, Rank, std::less<>> table;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    const auto where = "line " + std::to_string(record->line);
    if (!record->error.empty() || record->fields.size() != 2) {
      throw ProviderError(name(), where + ": malformed row");
    }
    const std::string site(trim(record->fields[0]));
    const auto rank_text = trim(record->fields[1]);
    if (rank_text.empty()) continue;  // listed but unranked
    const auto value = parse_unsigned(rank_text);
    if (!value || *value == 0) throw ProviderError(name(), where + ": invalid rank");
    table.insert_or_assign(site, Rank(*value));
  }
  table_ = std::move(table);
}

std::optional<Rank> FixtureRankingProvider::lookup(const std::string& site) {
  if (!table_) load();
  const auto it = table_->find(site);
  if (it == table_->end()) return std::nullopt;
  return it->second;
}

std::vector<RankingProviderResponse> fetch_ranks(
    std::span<const std::string> sites, RankingProvider& provider) {
  std::vector<RankingProviderResponse> out;
  out.reserve(sites.size());
  for (const auto& site : sites) {
    auto rank = provider.lookup(site);
    out.push_back({site, rank, provider.now()});
  }
  return out;
}

}  // namespace rankweight
