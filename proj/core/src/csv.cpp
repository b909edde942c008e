#include "fot/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fot/error.hpp"

namespace fot::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_row(std::string_view line, std::vector<double>& out) {
    out.clear();
    while (true) {
        const auto comma = line.find(',');
        std::string_view cell = trim(line.substr(0, comma));
        if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) return false;
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return true;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

Matrix parse_matrix(std::string_view text) {
    std::vector<double> data;
    std::vector<double> row;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.empty()) continue;
        if (!parse_row(line, row)) {
            if (rows == 0 && data.empty() && line_no == 1) continue;  // header
            std::ostringstream msg;
            msg << "csv: unparsable value on line " << line_no;
            throw ConfigError(msg.str());
        }
        if (rows == 0) cols = row.size();
        if (row.size() != cols) {
            std::ostringstream msg;
            msg << "csv: line " << line_no << " has " << row.size() << " columns, expected " << cols;
            throw ConfigError(msg.str());
        }
        data.insert(data.end(), row.begin(), row.end());
        ++rows;
    }
    try {
        return Matrix(rows, cols, std::move(data));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("csv: ") + e.what());
    }
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix(buffer.str());
}

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    return out;
}

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ConfigError("csv: cannot open " + path.string() + " for writing");
    out << join(header) << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
}

}  // namespace fot::csv
