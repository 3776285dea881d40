// table.hpp
// Column-named tables written as CSV. Doubles are emitted as the
// shortest decimal that round-trips, so re-running an experiment with
// the same config and seed produces byte-identical files.
#ifndef ROUTERLAB_TABLE_HPP
#define ROUTERLAB_TABLE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace routerlab {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::string to_csv() const;
};

/// Shortest round-trip decimal; NaN renders as "nan" (in-band sentinel).
std::string format_double(double v);

/// Writes content to path, throwing std::ios_base::failure on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace routerlab

#endif
