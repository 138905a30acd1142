#include "blockprec/threads.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace blockprec {

int thread_cap() {
#ifdef _OPENMP
  int cap = omp_get_max_threads();
#else
  int cap = 1;
#endif
  if (const char* env = std::getenv("BLOCKPREC_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested > 0 && requested < cap) {
        cap = requested;
      }
    } catch (...) {
      // unreadable value: leave the default cap
    }
  }
  return cap;
}

void apply_thread_cap() {
#ifdef _OPENMP
  omp_set_num_threads(thread_cap());
#endif
}

}  // namespace blockprec
