#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "obscert/grid.hpp"

namespace obscert {

// Boolean observation set on the grid, one bit per lattice cell.
struct Mask {
    GridSpec grid;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    explicit Mask(const GridSpec& g) : grid(g), bits(g.size(), 0) {}

    std::size_t count() const;
    double measure() const { return static_cast<double>(count()) * grid.cell_volume(); }
};

struct ThicknessReport {
    std::vector<double> L;    // window side lengths actually used (snapped to cells)
    double rho = 0.0;         // min over anchors of |mask ∩ window| / prod L_i
    std::vector<int> argmin_anchor;
    bool is_thick = false;    // rho > 0
    bool snapped = false;     // true when a requested L_i was not a multiple of dx
};

// Exact minimum window density over all N^d periodic anchors, windows snapped
// to whole cells, via d-dimensional prefix sums. O(N^d) after the table build.
ThicknessReport thickness_rho(const Mask& mask, const std::vector<double>& L);

// Naive O(N^d * prod(L_i/dx)) oracle; identical result on every input.
ThicknessReport thickness_rho_bruteforce(const Mask& mask, const std::vector<double>& L);

// Mask families. stripes: along axis 0 with the given duty cycle and period in
// cells. random: i.i.d. cells. holed: full mask with an empty periodic ball.
Mask gen_stripes(const GridSpec& grid, double duty, int period_cells);
Mask gen_random(const GridSpec& grid, double density, std::uint64_t seed);
Mask gen_holed(const GridSpec& grid, double radius, const std::vector<double>& center);

// Cyclic shift by whole cells (testing aid).
Mask shift_mask(const Mask& mask, const std::vector<int>& shift_cells);

}  // namespace obscert
