#include "spillover/csv.hpp"

#include <cstdio>

namespace spillover {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace spillover
