#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "obscert/errors.hpp"

namespace obscert {

// Uniform periodic grid on [0, box)^d approximating R^d. N points per axis
// (power of two), frequency lattice xi_k = 2 pi k / box, k in {-N/2..N/2-1}.
struct GridSpec {
    int d = 1;
    int N = 8;
    double box = 1.0;

    GridSpec() = default;
    GridSpec(int d_, int N_, double box_) : d(d_), N(N_), box(box_) { validate(); }

    void validate() const {
        if (d < 1 || d > 3) throw InvalidParams("GridSpec: d must be 1..3");
        if (N < 8 || (N & (N - 1)) != 0)
            throw InvalidParams("GridSpec: N must be a power of two >= 8");
        if (!(box > 0.0)) throw InvalidParams("GridSpec: box must be > 0");
    }

    double dx() const { return box / N; }
    double dxi() const { return 2.0 * 3.14159265358979323846 / box; }
    double nyquist() const { return 3.14159265358979323846 * N / box; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(N);
        return s;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= dx();
        return v;
    }
    // Signed frequency index for FFT-ordered index k in [0,N).
    int freq_index(int k) const { return k < N / 2 ? k : k - N; }
    double xi(int k) const { return dxi() * freq_index(k); }
    // Spatial coordinate of lattice index j in [0,N).
    double x(int j) const { return dx() * j; }
    // Periodic signed displacement from x0 to x, in (-box/2, box/2].
    double periodic_delta(double x_, double x0) const {
        double delta = std::fmod(x_ - x0, box);
        if (delta > box / 2) delta -= box;
        if (delta <= -box / 2) delta += box;
        return delta;
    }

    bool operator==(const GridSpec& o) const { return d == o.d && N == o.N && box == o.box; }
};

struct Field {
    GridSpec grid;
    std::vector<std::complex<double>> values;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.size()) {}

    std::size_t size() const { return values.size(); }
    void check_same_grid(const Field& other) const {
        if (!(grid == other.grid)) throw InvalidParams("Field: grid mismatch");
    }
};

// Decompose flat index into per-axis indices (row-major, axis 0 slowest).
inline void unflatten(const GridSpec& g, std::size_t idx, int out[3]) {
    for (int ax = g.d - 1; ax >= 0; --ax) {
        out[ax] = static_cast<int>(idx % g.N);
        idx /= g.N;
    }
}

inline std::size_t flatten(const GridSpec& g, const int idx[3]) {
    std::size_t flat = 0;
    for (int ax = 0; ax < g.d; ++ax) flat = flat * g.N + static_cast<std::size_t>(idx[ax]);
    return flat;
}

}  // namespace obscert
