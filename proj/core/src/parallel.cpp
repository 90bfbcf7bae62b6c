// SPDX-License-Identifier: Apache-2.0
#include "primefam/parallel.hpp"

#include <cstdlib>
#include <string>

namespace primefam {

unsigned default_threads() {
  if (const char* env = std::getenv("PRIMESIEVE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace primefam
