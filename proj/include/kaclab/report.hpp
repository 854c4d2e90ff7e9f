#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace kaclab {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "kaclab-csv/1";

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t h);

using Cell = std::variant<double, long long, std::string>;

struct RowMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string grid_hash;
};

// One table per output file. Every row carries the run metadata so any row
// can be traced back to its manifest on its own.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<RowMeta> meta;  // parallel to rows

    void add(std::vector<Cell> row, RowMeta m);
    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;
};

// Shortest round-trip formatting for doubles.
std::string fmt_double(double x);

}  // namespace kaclab
