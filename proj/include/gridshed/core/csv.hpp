#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace gridshed {

/// Minimal streaming CSV reader for the plain comma-separated files this
/// toolkit exchanges (no quoting, no embedded commas). Tracks line numbers
/// so parse errors can name their location.
class CsvReader {
public:
    /// Opens the file and reads the header row. Throws InputError if the file
    /// cannot be opened, SchemaError if it is empty.
    explicit CsvReader(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    const std::string& path() const { return path_; }

    /// Reads the next data row into `fields`. Returns false at end of file.
    /// Blank lines are skipped.
    bool next_row(std::vector<std::string>& fields);

    /// Line number of the row most recently returned by next_row.
    std::size_t line_number() const { return line_; }

    /// Throws SchemaError unless the header matches `expected` exactly.
    void expect_header(const std::vector<std::string>& expected) const;

private:
    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

/// Splits one CSV line on commas (no quoting rules).
std::vector<std::string> split_csv_line(const std::string& line);

/// Parse helpers; throw ParseError naming `context` on failure.
double parse_double_field(const std::string& text, const std::string& context);
long parse_int_field(const std::string& text, const std::string& context);

/// Canonical float formatting used in every CSV this toolkit writes:
/// shortest representation with 9 significant digits ("%.9g").
std::string format_value(double v);

}  // namespace gridshed
