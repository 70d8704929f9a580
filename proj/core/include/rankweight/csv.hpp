#ifndef RANKWEIGHT_CSV_HPP
#define RANKWEIGHT_CSV_HPP

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankweight::csv {

struct Record {
  std::size_t line = 0;  // physical line the record starts on, 1-based
  std::vector<std::string> fields;
  std::string error;     // non-empty when the record is malformed
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded line breaks,
// LF or CRLF endings.  A UTF-8 BOM on the first line is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // nullopt at end of input.  Malformed records are returned with `error`
  // set and the reader resynchronises at the next line.
  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  bool first_ = true;
};

// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace rankweight::csv

#endif  // RANKWEIGHT_CSV_HPP
