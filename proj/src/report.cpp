#include "kaclab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include <ostream>
#include <stdexcept>

namespace kaclab {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

void Table::add(std::vector<Cell> row, RowMeta m) {
    if (row.size() != columns.size()) throw std::logic_error("Table::add: column count mismatch in " + name);
    rows.push_back(std::move(row));
    meta.push_back(std::move(m));
}

namespace {
std::string cell_text(const Cell& c) {
    if (auto* d = std::get_if<double>(&c)) return fmt_double(*d);
    if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

nlohmann::json cell_json(const Cell& c) {
    if (auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return fmt_double(*d);  // JSON has no inf/nan
    }
    if (auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}
}  // namespace

void Table::write_csv(std::ostream& os) const {
    os << "# " << kCsvSchema << " table=" << name << " artifact_version=" << kArtifactVersion << "\n";
    os << "config_hash,seed,grid_hash,artifact_version";
    for (auto& c : columns) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << meta[r].config_hash << ',' << meta[r].seed << ',' << meta[r].grid_hash << ',' << kArtifactVersion;
        for (auto& c : rows[r]) os << ',' << cell_text(c);
        os << '\n';
    }
}

void Table::write_json(std::ostream& os) const {
    nlohmann::json j;
    j["schema"] = kCsvSchema;
    j["table"] = name;
    j["artifact_version"] = kArtifactVersion;
    auto cols = nlohmann::json::array({"config_hash", "seed", "grid_hash", "artifact_version"});
    for (auto& c : columns) cols.push_back(c);
    j["columns"] = cols;
    j["rows"] = nlohmann::json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        nlohmann::json row;
        row["config_hash"] = meta[r].config_hash;
        row["seed"] = meta[r].seed;
        row["grid_hash"] = meta[r].grid_hash;
        row["artifact_version"] = kArtifactVersion;
        for (std::size_t c = 0; c < columns.size(); ++c) row[columns[c]] = cell_json(rows[r][c]);
        j["rows"].push_back(row);
    }
    os << j.dump(2) << '\n';
}

}  // namespace kaclab
