#include "divest/csv.hpp"

#include <sstream>

#include <fmt/format.h>

#include "divest/error.hpp"

namespace divest {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

CsvWriter::CsvWriter(const std::filesystem::path& file, std::initializer_list<std::string_view> header)
    : file_(file), out_(file, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::IOError, "cannot open " + file.string() + " for writing");
    bool first = true;
    for (std::string_view h : header) {
        if (!first) out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<CsvCell> cells) {
    line_.clear();
    bool first = true;
    for (const CsvCell& cell : cells) {
        if (!first) line_.push_back(',');
        first = false;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    line_ += format_real(v);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    line_ += v;
                } else {
                    line_ += fmt::format("{}", v);
                }
            },
            cell);
    }
    line_.push_back('\n');
    out_ << line_;
    if (!out_) throw Error(ErrorKind::IOError, "write failed for " + file_.string());
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::IOError, "close failed for " + file_.string());
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorKind::ParseError, "missing CSV column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorKind::IOError, "cannot open " + file.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorKind::ParseError,
                        file.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw Error(ErrorKind::ParseError, file.string() + ": empty CSV");
    return table;
}

}  // namespace divest
