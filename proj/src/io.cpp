#include "obscert/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace obscert::io {

namespace {

constexpr char kMagic[4] = {'O', 'B', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("field read: truncated file");
    return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, static_cast<std::uint32_t>(f.grid.d));
    for (int ax = 0; ax < f.grid.d; ++ax) put(os, static_cast<std::uint32_t>(f.grid.N));
    for (int ax = 0; ax < f.grid.d; ++ax) put(os, f.grid.box);
    for (const auto& v : f.values) {
        put(os, v.real());
        put(os, v.imag());
    }
    if (!os) throw IoError("field write failed: " + path.string());

    nlohmann::json sidecar{{"format", "OBSF"},
                           {"version", kVersion},
                           {"d", f.grid.d},
                           {"N", f.grid.N},
                           {"box", f.grid.box},
                           {"dx", f.grid.dx()},
                           {"values", f.values.size()}};
    std::ofstream js(path.string() + ".json");
    js << sidecar.dump(2) << "\n";
}

Field read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("field read: bad magic in " + path.string());
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw IoError("field read: unsupported version");
    const auto d = get<std::uint32_t>(is);
    if (d < 1 || d > 3) throw IoError("field read: bad dimension");
    std::uint32_t N = 0;
    for (std::uint32_t ax = 0; ax < d; ++ax) {
        const auto n = get<std::uint32_t>(is);
        if (ax == 0)
            N = n;
        else if (n != N)
            throw IoError("field read: anisotropic N not supported");
    }
    double box = 0;
    for (std::uint32_t ax = 0; ax < d; ++ax) {
        const double b = get<double>(is);
        if (ax == 0)
            box = b;
        else if (b != box)
            throw IoError("field read: anisotropic box not supported");
    }
    Field f(GridSpec(static_cast<int>(d), static_cast<int>(N), box));
    for (auto& v : f.values) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        v = {re, im};
    }
    return f;
}

void write_mask(const std::filesystem::path& path, const Mask& m) {
    if (m.grid.d <= 2) {
        std::ofstream os(path);
        if (!os) throw IoError("cannot open for writing: " + path.string());
        const int rows = m.grid.d == 2 ? m.grid.N : 1;
        const int cols = m.grid.N;
        os << "P1\n" << cols << " " << rows << "\n";
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const std::size_t idx = m.grid.d == 2
                                            ? static_cast<std::size_t>(i) * cols + j
                                            : static_cast<std::size_t>(j);
                os << (m.bits[idx] ? '1' : '0') << (j + 1 < cols ? ' ' : '\n');
            }
        }
        return;
    }
    Field f(m.grid);
    for (std::size_t i = 0; i < m.bits.size(); ++i) f.values[i] = m.bits[i] ? 1.0 : 0.0;
    write_field(path, f);
}

Mask read_mask_pbm(const std::filesystem::path& path, const GridSpec& grid) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    std::string magic;
    is >> magic;
    if (magic != "P1") throw IoError("mask read: expected P1 PBM");
    int cols = 0, rows = 0;
    is >> cols >> rows;
    if (cols != grid.N || rows != (grid.d == 2 ? grid.N : 1))
        throw IoError("mask read: dimensions do not match grid");
    Mask m(grid);
    for (auto& b : m.bits) {
        int v = 0;
        is >> v;
        if (!is) throw IoError("mask read: truncated PBM");
        b = v ? 1 : 0;
    }
    return m;
}

std::string CsvWriter::format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_double(v));
    rows_.push_back(std::move(cells));
}

void CsvWriter::add_row_raw(const std::vector<std::string>& row) { rows_.push_back(row); }

std::string CsvWriter::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i)
        os << header_[i] << (i + 1 < header_.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
    return os.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << str();
    if (!os) throw IoError("csv write failed: " + path.string());
}

}  // namespace obscert::io
