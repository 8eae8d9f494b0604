#pragma once

#include <string>

namespace rasch {

// Shortest general-format rendering with 12 significant digits and a '.'
// decimal separator regardless of locale.
std::string format_number(double value);

}  // namespace rasch
