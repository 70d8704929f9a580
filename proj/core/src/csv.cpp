#include "rankweight/csv.hpp"

namespace rankweight::csv {

std::optional<Record> Reader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  if (first_) {
    first_ = false;
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  }

  Record record;
  record.line = line_;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;  // just closed a quoted field
  std::size_t i = 0;

  for (;;) {
    if (i == line.size()) {
      if (!in_quotes) break;
      // Quoted field spans a line break.
      std::string more;
      if (!std::getline(in_, more)) {
        record.error = "unterminated quoted field";
        return record;
      }
      ++line_;
      if (!line.empty() && line.back() == '\r') {
        field.pop_back();
        field += "\r\n";
      } else {
        field += '\n';
      }
      line = std::move(more);
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (in_quotes) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == ',') {
      record.fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '"') {
      if (!field.empty() || after_quote) {
        record.error = "stray quote in field " +
                       std::to_string(record.fields.size() + 1);
        return record;
      }
      in_quotes = true;
    } else if (c == '\r' && i == line.size()) {
      // CRLF terminator
    } else if (after_quote) {
      record.error = "characters after closing quote in field " +
                     std::to_string(record.fields.size() + 1);
      return record;
    } else {
      field += c;
    }
  }
  record.fields.push_back(std::move(field));
  return record;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace rankweight::csv
