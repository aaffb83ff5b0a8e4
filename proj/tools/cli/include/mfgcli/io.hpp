#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfg/field.hpp"

namespace mfg::cli {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// `cell,x,value` in 1D, `cell,x,y,value` in 2D, one row per cell.
std::string field_csv(const Field& f);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Reads a snapshot written by field_csv back onto `grid`. The header,
/// column count, cell order and coordinates are checked; errors name the
/// file.
Field read_field_csv(const std::filesystem::path& path, const Grid& grid);

/// Hash git assigns to a blob with these contents (hex SHA-1).
std::string git_blob_hash(const std::string& contents);

}  // namespace mfg::cli
