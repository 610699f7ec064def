#include "detail/parallel.hpp"

#include <cstdlib>
#include <string>

namespace reluspan::detail {

unsigned worker_count() {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("RELU_SPAN_THREADS");
  if (env == nullptr) return hardware;
  char* end = nullptr;
  const long requested = std::strtol(env, &end, 10);
  if (end == env || requested <= 0) return hardware;
  return static_cast<unsigned>(std::min<long>(requested, 1024));
}

}  // namespace reluspan::detail
