#pragma once

#include <string>

namespace spsc {

/// Real number in the report dialect: 9 significant digits, '.' separator.
std::string format_real(double value);

}  // namespace spsc
