#pragma once

// CSV exchange format: a header row of column names, one column per series
// dimension, one row per time point, no index column. Values are written with
// 17 significant digits so that a write/read cycle is lossless.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmrnn/types.hpp"

namespace lmrnn {

void write_csv(std::ostream& os, const TimeSeries& series);
void write_csv(const std::filesystem::path& path, const TimeSeries& series);

/// Throws DataError on unreadable files, ragged rows or non-numeric cells.
[[nodiscard]] TimeSeries read_csv(std::istream& is);
[[nodiscard]] TimeSeries read_csv(const std::filesystem::path& path);

/// Generic table writer for plot data (columns of equal length).
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& columns);

[[nodiscard]] std::string format_double(double v);

}  // namespace lmrnn
