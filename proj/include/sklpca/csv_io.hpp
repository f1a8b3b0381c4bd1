#pragma once

#include "sklpca/dataset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sklpca {

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Strict decimal parse of a whole cell; false on failure.
[[nodiscard]] bool parse_double(const std::string& text, double& value);

/// Split one CSV line on commas (no quoting; ids must not contain commas).
[[nodiscard]] std::vector<std::string> split_csv_line(const std::string& line);

struct LoadReport {
    bool reordered = false; ///< input rows were not in (subject, time) order
};

/**
 * Reads `subject_id,time,y,f0..f{p-1}`. Rows are sorted by subject id, then
 * time. Missing or non-numeric cells, ragged rows and duplicate
 * (subject, time) pairs raise ParseError naming the file line and data row.
 */
[[nodiscard]] LongitudinalDataset load_csv(std::istream& in, LoadReport* report = nullptr);
[[nodiscard]] LongitudinalDataset load_csv_file(const std::string& path, LoadReport* report = nullptr);

void write_csv(std::ostream& out, const LongitudinalDataset& data);
void write_csv_file(const std::string& path, const LongitudinalDataset& data);

/// Generic table with a header row; used for predictions and experiment files.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws InputError when absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

[[nodiscard]] CsvTable read_table(std::istream& in);
[[nodiscard]] CsvTable read_table_file(const std::string& path);

} // namespace sklpca
