#include "spsc/csv.hpp"

#include <cstdio>

namespace spsc {

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

}  // namespace spsc
