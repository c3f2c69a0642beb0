#include "tabf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tabf {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) {
        throw std::invalid_argument("write_csv: header/column count mismatch");
    }
    const size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << format_double(columns[c][r]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path.string());
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(cell);
    }
    table.columns.resize(table.header.size());
    size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= table.columns.size()) {
                throw std::runtime_error("read_csv: too many cells in row " + std::to_string(row) +
                                         " of " + path.string());
            }
            table.columns[c].push_back(std::strtod(cell.c_str(), nullptr));
            ++c;
        }
        if (c != table.columns.size()) {
            throw std::runtime_error("read_csv: short row " + std::to_string(row) + " in " +
                                     path.string());
        }
        ++row;
    }
    return table;
}

void write_pgm_with_sidecar(const std::filesystem::path& path, int bins1, int bins2,
                            std::span<const double> values, std::span<const std::uint8_t> mask) {
    if (values.size() != static_cast<size_t>(bins1) * bins2) {
        throw std::invalid_argument("write_pgm_with_sidecar: value count mismatch");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t k = 0; k < values.size(); ++k) {
        if (!mask.empty() && !mask[k]) continue;
        lo = std::min(lo, values[k]);
        hi = std::max(hi, values[k]);
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 0.0;
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm_with_sidecar: cannot open " + path.string());
    out << "P2\n" << bins1 << " " << bins2 << "\n255\n";
    for (int row = 0; row < bins2; ++row) {
        const int j = bins2 - 1 - row;
        for (int i = 0; i < bins1; ++i) {
            const size_t k = static_cast<size_t>(i) * bins2 + j;
            int level = 0;
            if (mask.empty() || mask[k]) {
                level = static_cast<int>(std::lround((values[k] - lo) / span * 255.0));
                level = std::clamp(level, 0, 255);
            }
            out << level << (i + 1 < bins1 ? " " : "\n");
        }
    }
    nlohmann::json sidecar;
    sidecar["min"] = lo;
    sidecar["max"] = hi;
    sidecar["bins1"] = bins1;
    sidecar["bins2"] = bins2;
    sidecar["masked_value"] = 0;
    sidecar["rows"] = "x2 from high to low";
    std::ofstream side(path.string() + ".json", std::ios::binary);
    side << sidecar.dump(2) << "\n";
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string hash_string(const std::string& text) {
    const auto h = fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path.string());
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hash_string(contents);
}

}  // namespace tabf
