#pragma once

#include <string>
#include <vector>

namespace cqed {

/// Minimal CSV builder. Numbers are written with %.15g so that outputs are
/// byte-stable and keep at least 12 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    /// Row with leading text cells followed by numbers.
    void add_row(const std::vector<std::string>& text, const std::vector<double>& values);

    std::size_t columns() const { return columns_; }
    const std::string& str() const { return buffer_; }

private:
    std::size_t columns_;
    std::string buffer_;
};

std::string format_number(double value);

}  // namespace cqed
