#pragma once

#include <cmath>

namespace feelsim {

// P(W) = 10^((dBm - 30) / 10); 20 dBm -> 0.1 W, -10 dBm -> 1e-4 W
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace feelsim
