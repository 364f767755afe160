#include "cqed/csv.hpp"

#include "cqed/common.hpp"

#include <cmath>
#include <cstdio>

namespace cqed {

std::string format_number(double value)
{
    if (value == 0.0) return "0";  // folds -0 into 0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
{
    require(!header.empty(), ErrorKind::InvalidArgument, "CsvWriter: empty header");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& values) { add_row({}, values); }

void CsvWriter::add_row(const std::vector<std::string>& text, const std::vector<double>& values)
{
    require(text.size() + values.size() == columns_, ErrorKind::DimensionMismatch,
            "CsvWriter: row width differs from header");
    bool first = true;
    for (const std::string& cell : text) {
        if (!first) buffer_ += ',';
        buffer_ += cell;
        first = false;
    }
    for (double v : values) {
        if (!first) buffer_ += ',';
        buffer_ += format_number(v);
        first = false;
    }
    buffer_ += '\n';
}

}  // namespace cqed
