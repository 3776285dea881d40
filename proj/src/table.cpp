#include "routerlab/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace routerlab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != header.size())
        throw std::invalid_argument("Table: row width does not match header");
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* d = std::get_if<double>(&row[i]))
                out += format_double(*d);
            else if (const auto* n = std::get_if<std::int64_t>(&row[i]))
                out += std::to_string(*n);
            else
                out += std::get<std::string>(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::ios_base::failure("cannot open for writing: " + path);
    f << content;
    f.flush();
    if (!f) throw std::ios_base::failure("write failed: " + path);
}

}  // namespace routerlab
