#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tees {

// Six significant digits, the precision used in every CSV artifact.
std::string format_number(double value);

// Splits one CSV line on commas; no quoting support is needed for our files.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace tees
