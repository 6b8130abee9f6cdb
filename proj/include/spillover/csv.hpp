#pragma once

#include <string>

namespace spillover {

// 17-significant-digit decimal rendering ("%.17g"): doubles round-trip
// exactly and output files stay byte-stable across reruns.
std::string g17(double v);

}  // namespace spillover
