#include "obscert/thickness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "obscert/rng.hpp"

namespace obscert {

std::size_t Mask::count() const {
    std::size_t c = 0;
    for (std::uint8_t b : bits) c += b ? 1 : 0;
    return c;
}

namespace {

// Windows in whole cells per axis, embedded into 3D (absent axes get size 1).
struct WindowSpec {
    std::array<int, 3> n{1, 1, 1};  // grid cells per axis
    std::array<int, 3> w{1, 1, 1};  // window cells per axis
    long window_cells = 1;
    bool snapped = false;
};

WindowSpec make_window(const Mask& mask, const std::vector<double>& L) {
    const GridSpec& g = mask.grid;
    if (static_cast<int>(L.size()) != g.d)
        throw InvalidParams("thickness: L must have d entries");
    WindowSpec ws;
    const double dx = g.dx();
    for (int ax = 0; ax < g.d; ++ax) {
        if (!(L[ax] > 0.0)) throw InvalidParams("thickness: window lengths must be positive");
        if (L[ax] > g.box + 0.5 * dx)
            throw InvalidParams("thickness: window larger than box");
        const double cells_exact = L[ax] / dx;
        int w = static_cast<int>(std::lround(cells_exact));
        if (std::abs(cells_exact - w) > 1e-9) ws.snapped = true;
        w = std::clamp(w, 1, g.N);
        ws.n[ax] = g.N;
        ws.w[ax] = w;
        ws.window_cells *= w;
    }
    return ws;
}

ThicknessReport make_report(const Mask& mask, const WindowSpec& ws, long min_count,
                            const std::array<int, 3>& argmin) {
    const GridSpec& g = mask.grid;
    ThicknessReport rep;
    rep.snapped = ws.snapped;
    for (int ax = 0; ax < g.d; ++ax) rep.L.push_back(ws.w[ax] * g.dx());
    rep.rho = static_cast<double>(min_count) / static_cast<double>(ws.window_cells);
    rep.argmin_anchor.assign(argmin.begin(), argmin.begin() + g.d);
    rep.is_thick = rep.rho > 0.0;
    return rep;
}

inline std::size_t flat3(const std::array<int, 3>& dims, int i, int j, int k) {
    return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
}

}  // namespace

ThicknessReport thickness_rho(const Mask& mask, const std::vector<double>& L) {
    const WindowSpec ws = make_window(mask, L);
    const auto& n = ws.n;
    const auto& w = ws.w;

    // Tile the mask periodically to (n_i + w_i), then prefix-sum; the window
    // sum at any anchor is 8-corner inclusion-exclusion.
    std::array<int, 3> ext{n[0] + w[0], n[1] + w[1], n[2] + w[2]};
    std::array<int, 3> pd{ext[0] + 1, ext[1] + 1, ext[2] + 1};
    std::vector<long long> pre(static_cast<std::size_t>(pd[0]) * pd[1] * pd[2], 0);

    const GridSpec& g = mask.grid;
    auto mask_at = [&](int i, int j, int k) -> long long {
        std::array<int, 3> idx{i % n[0], j % n[1], k % n[2]};
        int raw[3] = {idx[0], idx[1], idx[2]};
        return mask.bits[flatten(g, raw)] ? 1 : 0;
    };

    for (int i = 1; i < pd[0]; ++i)
        for (int j = 1; j < pd[1]; ++j)
            for (int k = 1; k < pd[2]; ++k) {
                long long v = mask_at(i - 1, j - 1, k - 1);
                v += pre[flat3(pd, i - 1, j, k)] + pre[flat3(pd, i, j - 1, k)] +
                     pre[flat3(pd, i, j, k - 1)];
                v -= pre[flat3(pd, i - 1, j - 1, k)] + pre[flat3(pd, i - 1, j, k - 1)] +
                     pre[flat3(pd, i, j - 1, k - 1)];
                v += pre[flat3(pd, i - 1, j - 1, k - 1)];
                pre[flat3(pd, i, j, k)] = v;
            }

    auto box_sum = [&](int i, int j, int k) -> long long {
        const int i2 = i + w[0], j2 = j + w[1], k2 = k + w[2];
        return pre[flat3(pd, i2, j2, k2)] - pre[flat3(pd, i, j2, k2)] -
               pre[flat3(pd, i2, j, k2)] - pre[flat3(pd, i2, j2, k)] +
               pre[flat3(pd, i, j, k2)] + pre[flat3(pd, i, j2, k)] +
               pre[flat3(pd, i2, j, k)] - pre[flat3(pd, i, j, k)];
    };

    long long min_count = std::numeric_limits<long long>::max();
    std::array<int, 3> argmin{0, 0, 0};
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                const long long s = box_sum(i, j, k);
                if (s < min_count) {
                    min_count = s;
                    argmin = {i, j, k};
                }
            }
    return make_report(mask, ws, static_cast<long>(min_count), argmin);
}

ThicknessReport thickness_rho_bruteforce(const Mask& mask, const std::vector<double>& L) {
    const WindowSpec ws = make_window(mask, L);
    const auto& n = ws.n;
    const auto& w = ws.w;
    const GridSpec& g = mask.grid;

    long long min_count = std::numeric_limits<long long>::max();
    std::array<int, 3> argmin{0, 0, 0};
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                long long s = 0;
                for (int di = 0; di < w[0]; ++di)
                    for (int dj = 0; dj < w[1]; ++dj)
                        for (int dk = 0; dk < w[2]; ++dk) {
                            int raw[3] = {(i + di) % n[0], (j + dj) % n[1], (k + dk) % n[2]};
                            s += mask.bits[flatten(g, raw)] ? 1 : 0;
                        }
                if (s < min_count) {
                    min_count = s;
                    argmin = {i, j, k};
                }
            }
    return make_report(mask, ws, static_cast<long>(min_count), argmin);
}

Mask gen_stripes(const GridSpec& grid, double duty, int period_cells) {
    if (!(duty >= 0.0 && duty <= 1.0)) throw InvalidParams("gen_stripes: duty must be in [0,1]");
    if (period_cells < 1 || period_cells > grid.N)
        throw InvalidParams("gen_stripes: period must be in [1,N] cells");
    Mask m(grid);
    const int on_cells = static_cast<int>(std::lround(duty * period_cells));
    int idx[3];
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
        unflatten(grid, i, idx);
        m.bits[i] = (idx[0] % period_cells) < on_cells ? 1 : 0;
    }
    return m;
}

Mask gen_random(const GridSpec& grid, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0))
        throw InvalidParams("gen_random: density must be in [0,1]");
    Mask m(grid);
    std::mt19937_64 gen = substream(seed, 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& b : m.bits) b = unif(gen) < density ? 1 : 0;
    return m;
}

Mask gen_holed(const GridSpec& grid, double radius, const std::vector<double>& center) {
    if (!(radius >= 0.0)) throw InvalidParams("gen_holed: radius must be >= 0");
    if (radius > grid.box / 2.0)
        throw InvalidParams("gen_holed: radius exceeds box/2");
    if (static_cast<int>(center.size()) != grid.d)
        throw InvalidParams("gen_holed: center must have d entries");
    Mask m(grid);
    int idx[3];
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
        unflatten(grid, i, idx);
        double r2 = 0.0;
        for (int ax = 0; ax < grid.d; ++ax) {
            const double delta = grid.periodic_delta(grid.x(idx[ax]), center[ax]);
            r2 += delta * delta;
        }
        m.bits[i] = r2 < radius * radius ? 0 : 1;
    }
    return m;
}

Mask shift_mask(const Mask& mask, const std::vector<int>& shift_cells) {
    if (static_cast<int>(shift_cells.size()) != mask.grid.d)
        throw InvalidParams("shift_mask: shift must have d entries");
    Mask out(mask.grid);
    const int N = mask.grid.N;
    int idx[3];
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        unflatten(mask.grid, i, idx);
        int src[3] = {0, 0, 0};
        for (int ax = 0; ax < mask.grid.d; ++ax)
            src[ax] = ((idx[ax] - shift_cells[ax]) % N + N) % N;
        out.bits[i] = mask.bits[flatten(mask.grid, src)];
    }
    return out;
}

}  // namespace obscert
