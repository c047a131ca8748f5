#include "obscert/parallel.hpp"

#include <atomic>
#include <string>

namespace obscert {

namespace {

int initial_threads() {
    if (const char* env = std::getenv("OBSCERT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

std::atomic<int> g_threads{initial_threads()};

}  // namespace

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) { g_threads.store(n >= 1 ? n : 1); }

}  // namespace obscert
