#include "mapf/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mapf {

int default_workers() {
  if (const char* env = std::getenv("MAPF_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace mapf
