#include "obscert/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace obscert {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

// Plans are created once per (d, N) on a scratch buffer with FFTW_ESTIMATE and
// executed via fftw_execute_dft on caller buffers (new-array execute).
const PlanPair& get_plans(int d, int N) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(d, N);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    std::vector<int> dims(d, N);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
    fftw_complex* buf = fftw_alloc_complex(total);
    PlanPair p;
    p.fwd = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    return plan_cache().emplace(key, p).first->second;
}

}  // namespace

void dft_inplace(Field& f, int sign) {
    const PlanPair& plans = get_plans(f.grid.d, f.grid.N);
    auto* data = reinterpret_cast<fftw_complex*>(f.values.data());
    fftw_execute_dft(sign < 0 ? plans.fwd : plans.bwd, data, data);
}

void fft_roundtrip_normalize(Field& f) {
    dft_inplace(f, -1);
    dft_inplace(f, +1);
    const double scale = 1.0 / static_cast<double>(f.grid.size());
    for (auto& v : f.values) v *= scale;
}

}  // namespace obscert
