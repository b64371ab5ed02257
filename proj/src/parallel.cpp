#include "qam/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace qam {
namespace {

int default_threads() {
  static const int n = omp_get_max_threads();
  return n;
}

int& limit() {
  static int value = [] {
    const char* env = std::getenv("QAM_THREADS");
    if (!env) return 0;
    try {
      const int v = std::stoi(env);
      return v > 0 ? v : 0;
    } catch (...) {
      return 0;
    }
  }();
  return value;
}

}  // namespace

int configured_threads() {
  const int base = default_threads();
  const int cap = limit();
  const int n = cap > 0 ? cap : base;
  omp_set_num_threads(n);
  return n;
}

void set_thread_limit(int threads) {
  default_threads();
  limit() = threads > 0 ? threads : 0;
  configured_threads();
}

}  // namespace qam
