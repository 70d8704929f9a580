#include "rankweight/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "rankweight/country_codes.hpp"
#include "rankweight/csv.hpp"
#include "rankweight/errors.hpp"
#include "rankweight/ingestion.hpp"

namespace rankweight {

std::string format_shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_fixed(double value, int precision) {
  if (!std::isfinite(value)) return format_shortest(value);
  precision = std::max(precision, 0);

  char buf[400];
  const auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::fixed);
  std::string text(buf, end);

  const auto dot = text.find('.');
  std::string digits = dot == std::string::npos ? text : text.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  const bool round_up =
      frac.size() > static_cast<std::size_t>(precision) && frac[precision] >= '5';
  frac.resize(static_cast<std::size_t>(precision), '0');
  digits += frac;

  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
      if (i == 0) digits.insert(digits.begin(), '1');
    }
  }
  const std::size_t new_int_len = digits.size() - frac.size();
  std::string out = digits.substr(0, new_int_len);
  if (precision > 0) out += "." + digits.substr(new_int_len);

  const bool all_zero = std::all_of(digits.begin(), digits.end(),
                                    [](char c) { return c == '0'; });
  if (std::signbit(value) && !all_zero) out.insert(out.begin(), '-');
  return out;
}

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const Decimal& d) const {
      return format_fixed(d.value, d.precision);
    }
  };
  return std::visit(Visitor{}, cell);
}

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw ParameterError("row has " + std::to_string(row.size()) +
                         " cells, table has " + std::to_string(columns.size()) +
                         " columns");
  }
  rows.push_back(std::move(row));
}

std::optional<TableFormat> parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::kCsv;
  if (text == "json") return TableFormat::kJson;
  if (text == "markdown" || text == "md") return TableFormat::kMarkdown;
  return std::nullopt;
}

ReportTable country_table(const CountryRanking& ranking, TableStyle style) {
  ReportTable table;
  const auto label = [](const CountryAggregate& a) -> std::vector<Cell> {
    return {std::string(a.country.str()),
            std::string(country_display_name(a.country.str()))};
  };

  switch (style) {
    case TableStyle::kUniversityCount:
      table.title = "Countries by number of universities";
      table.columns = {"Rank", "Code", "Country Name", "Number of Universities"};
      for (const auto& [pos, a] : ranking) {
        auto row = label(a);
        row.insert(row.begin(), static_cast<std::int64_t>(pos));
        row.emplace_back(static_cast<std::int64_t>(a.n));
        table.add_row(std::move(row));
      }
      break;
    case TableStyle::kCountryWeight:
      table.title = "Countries by weight of academic traffic";
      table.columns = {"Rank", "Code", "Country Name", "Number of Universities",
                       "Weight of Country (W_c)"};
      for (const auto& [pos, a] : ranking) {
        auto row = label(a);
        row.insert(row.begin(), static_cast<std::int64_t>(pos));
        row.emplace_back(static_cast<std::int64_t>(a.n));
        row.emplace_back(Decimal{a.w_c, kCountryWeightDecimals});
        table.add_row(std::move(row));
      }
      break;
    case TableStyle::kCountryAverage:
      table.title = "Average weight of universities in each country";
      table.columns = {"Rank", "Code", "Country Name", "Country's Weight",
                       "Number of Universities",
                       "Average Weight of Country (A_wc) * 10^6"};
      for (const auto& [pos, a] : ranking) {
        auto row = label(a);
        row.insert(row.begin(), static_cast<std::int64_t>(pos));
        row.emplace_back(Decimal{a.w_c, kCountryWeightDecimals});
        row.emplace_back(static_cast<std::int64_t>(a.n));
        row.emplace_back(Decimal{average_country_weight(a) * kAverageScale,
                                 kAverageDecimals});
        table.add_row(std::move(row));
      }
      break;
    case TableStyle::kTopUniversities:
      throw ParameterError("top-universities tables are built from universities");
  }
  return table;
}

ReportTable university_table(std::span<const RankedUniversity> universities) {
  ReportTable table;
  table.title = "Weight of top universities";
  table.columns = {"Rank", "University Name", "Code", "Global Rank", "W_u"};
  for (const auto& u : universities) {
    table.add_row({static_cast<std::int64_t>(u.position), u.name,
                   std::string(u.country.str()),
                   static_cast<std::int64_t>(u.rank.value()),
                   Decimal{u.weight, kSiteWeightDecimals}});
  }
  return table;
}

namespace {

std::string render_csv(const ReportTable& table) {
  std::string out = csv::join_row(table.columns) + "\n";
  for (const auto& row : table.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const auto& cell : row) fields.push_back(cell_text(cell));
    out += csv::join_row(fields) + "\n";
  }
  return out;
}

std::string render_json(const ReportTable& table) {
  nlohmann::ordered_json doc;
  doc["title"] = table.title;
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto cells = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* s = std::get_if<std::string>(&cell)) {
        cells.push_back(*s);
      } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        cells.push_back(*i);
      } else {
        // Round at print precision, then emit as a JSON number.
        cells.push_back(std::stod(cell_text(cell)));
      }
    }
    rows.push_back(std::move(cells));
  }
  doc["rows"] = std::move(rows);
  if (!table.notes.empty()) doc["notes"] = table.notes;
  return doc.dump(2) + "\n";
}

std::string markdown_cell(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

std::string render_markdown(const ReportTable& table) {
  std::string out;
  if (!table.title.empty()) out += "**" + markdown_cell(table.title) + "**\n\n";
  out += "|";
  for (const auto& c : table.columns) out += " " + markdown_cell(c) + " |";
  out += "\n|";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : table.rows) {
    out += "|";
    for (const auto& cell : row) out += " " + markdown_cell(cell_text(cell)) + " |";
    out += "\n";
  }
  if (!table.notes.empty()) {
    out += "\n";
    for (const auto& note : table.notes) out += "> " + markdown_cell(note) + "\n";
  }
  return out;
}

}  // namespace

std::string render_table(const ReportTable& table, TableFormat format) {
  switch (format) {
    case TableFormat::kCsv:
      return render_csv(table);
    case TableFormat::kJson:
      return render_json(table);
    case TableFormat::kMarkdown:
      return render_markdown(table);
  }
  return render_csv(table);
}

std::string emit_table(const CountryRanking& ranking, TableStyle style,
                       TableFormat format) {
  return render_table(country_table(ranking, style), format);
}

std::string emit_table(std::span<const RankedUniversity> universities,
                       TableFormat format) {
  return render_table(university_table(universities), format);
}

std::string emit_dataset(std::span<const UniversityRecord> records) {
  std::vector<const UniversityRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const UniversityRecord* a, const UniversityRecord* b) {
                     if (a->country != b->country) return a->country < b->country;
                     return a->name < b->name;
                   });

  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto* r : sorted) {
    out += csv::join_row({r->name, std::string(r->country.str()),
                          r->rank ? std::to_string(r->rank->value()) : ""});
    out += '\n';
  }
  return out;
}

}  // namespace rankweight
