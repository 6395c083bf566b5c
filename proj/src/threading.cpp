#include "hypermesh/threading.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hypermesh {

namespace {

int read_budget() {
    const char* env = std::getenv("HYPERMESH_THREADS");
    int n = 0;
    if (env != nullptr) n = std::atoi(env);
#ifdef _OPENMP
    if (n <= 0) n = omp_get_max_threads();
#else
    if (n <= 0) n = 1;
#endif
    return n;
}

}  // namespace

int thread_count() {
    static const int budget = read_budget();
    return budget;
}

bool parallel_worthwhile(int n) { return thread_count() > 1 && n >= 64; }

}  // namespace hypermesh
