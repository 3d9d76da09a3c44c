#include <cstdlib>
#include <string_view>

#include "morselab/simd/kernels.hpp"

namespace morselab::simd {

const KernelTable& active_kernels() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("MORSELAB_SIMD");
    const std::string_view choice = env ? env : "auto";
    if (choice == "scalar") return scalar_kernels();
    if (const KernelTable* fast = avx2_kernels()) return *fast;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace morselab::simd
