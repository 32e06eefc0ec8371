#pragma once

#include <string>

#include "copulaboost/boosting.hpp"

namespace cpb {

// Versioned, self-describing JSON fit artifact.  Doubles are written in
// shortest round-trip form, so reloading reproduces in-memory values
// bit-exactly.
std::string fit_to_json(const BoostFit& fit);
BoostFit fit_from_json(const std::string& text);

void save_fit(const BoostFit& fit, const std::string& path);
BoostFit load_fit(const std::string& path);

}  // namespace cpb
