#ifndef DIVEST_CSV_HPP
#define DIVEST_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace divest {

/// Shortest round-trip text is not used for data: every real is written
/// with 17 significant digits.
std::string format_real(double value);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// Header row plus data rows, '.' decimal separator, LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& file, std::initializer_list<std::string_view> header);

    void row(std::initializer_list<CsvCell> cells);
    void close();

private:
    std::filesystem::path file_;
    std::ofstream out_;
    std::string line_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& file);

}  // namespace divest

#endif  // DIVEST_CSV_HPP
