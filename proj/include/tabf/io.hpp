#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tabf {

// CSV with a header row, comma separators, LF line endings and floats
// printed with 17 significant digits. `columns` are equally long.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// Numeric CSV reader for the diff tool: returns column-major values and
// the header names.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};
CsvTable read_csv(const std::filesystem::path& path);

// P2 (ASCII) PGM, values linearly mapped to 0..255 over [lo, hi]; a JSON
// sidecar at <path>.json records the mapping. Rows scan x2 from high to
// low so the origin sits at the bottom-left of the image.
void write_pgm_with_sidecar(const std::filesystem::path& path, int bins1, int bins2,
                            std::span<const double> values, std::span<const std::uint8_t> mask);

std::string format_double(double v);

// FNV-1a 64-bit content hash, hex-encoded.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::string hash_file(const std::filesystem::path& path);
std::string hash_string(const std::string& text);

}  // namespace tabf
