#include "gridshed/core/csv.hpp"

#include <charconv>
#include <cstdio>

#include "gridshed/core/errors.hpp"

namespace gridshed {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return fields;
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) {
        throw InputError("cannot open file: " + path);
    }
    std::string line;
    if (!std::getline(in_, line)) {
        throw SchemaError(path + ": empty file, expected a header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header_ = split_csv_line(line);
    line_ = 1;
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fields = split_csv_line(line);
        return true;
    }
    return false;
}

void CsvReader::expect_header(const std::vector<std::string>& expected) const {
    if (header_ != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ",";
            want += expected[i];
        }
        throw SchemaError(path_ + ": unexpected header (expected '" + want + "')");
    }
}

double parse_double_field(const std::string& text, const std::string& context) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(context + ": cannot parse number '" + text + "'");
    }
    return v;
}

long parse_int_field(const std::string& text, const std::string& context) {
    long v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(context + ": cannot parse integer '" + text + "'");
    }
    return v;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace gridshed
