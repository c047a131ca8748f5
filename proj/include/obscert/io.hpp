#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "obscert/grid.hpp"
#include "obscert/thickness.hpp"

namespace obscert::io {

// Binary field dump: magic "OBSF", version u32, d u32, N per axis u32,
// box per axis f64, then little-endian f64 interleaved (re, im).
// A JSON sidecar <path>.json carries the grid metadata.
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

// P1 PBM bitmap for d <= 2 masks; d = 3 masks go through the field format
// with 0/1 values.
void write_mask(const std::filesystem::path& path, const Mask& m);
Mask read_mask_pbm(const std::filesystem::path& path, const GridSpec& grid);

// CSV with fixed column order and 17-significant-digit floats.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(const std::vector<double>& row);
    void add_row_raw(const std::vector<std::string>& row);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

    static std::string format_double(double v);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace obscert::io
