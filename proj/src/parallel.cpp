#include "palmtex/parallel.hpp"

#include <cstdlib>
#include <string>

namespace palmtex {

unsigned default_thread_count() {
    if (const char* env = std::getenv("PALMTEX_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace palmtex
