#ifndef LDDFLOW_CSV_HPP
#define LDDFLOW_CSV_HPP

#include <cstdio>
#include <string>

namespace lddflow {

/// Shortest round-trippable decimal form, 17 significant digits.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace lddflow

#endif
