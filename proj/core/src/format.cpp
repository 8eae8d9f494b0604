#include "rasch/format.hpp"

#include <array>
#include <charconv>

namespace rasch {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 12);
  if (ec != std::errc{}) return "nan";
  return {buf.data(), end};
}

}  // namespace rasch
