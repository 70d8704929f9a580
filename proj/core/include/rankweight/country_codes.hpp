#ifndef RANKWEIGHT_COUNTRY_CODES_HPP
#define RANKWEIGHT_COUNTRY_CODES_HPP

#include <cstddef>
#include <optional>
#include <string_view>

namespace rankweight {

// Display name for an ISO 3166-1 alpha-2 code (or "XX").
std::optional<std::string_view> country_name(std::string_view code);

// Falls back to the code itself for unknown codes.
std::string_view country_display_name(std::string_view code);

std::size_t country_table_size();

}  // namespace rankweight

#endif  // RANKWEIGHT_COUNTRY_CODES_HPP
