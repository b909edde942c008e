#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fot/linalg.hpp"

namespace fot::csv {

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_double(double v);

/// Reads a numeric CSV into a matrix. A first line that does not parse as
/// numbers is treated as a header and skipped. Throws ConfigError on ragged
/// rows, unparsable cells, or an unreadable file.
[[nodiscard]] Matrix read_matrix(const std::filesystem::path& path);
[[nodiscard]] Matrix parse_matrix(std::string_view text);

/// Writes `header` then one line per matrix row.
void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const Matrix& m);

[[nodiscard]] std::string join(const std::vector<std::string>& cells);

}  // namespace fot::csv
