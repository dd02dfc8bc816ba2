#pragma once

#include <string>

namespace maxlab {

// One verified inequality lhs >= rhs.
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // lhs - rhs
    double tolerance = 0.0;
    bool pass = false;   // slack >= -tolerance
    std::string details;
};

[[nodiscard]] inline CheckReport make_report(std::string name, double lhs, double rhs, double tolerance,
                                             std::string details = {}) {
    CheckReport r{std::move(name), lhs, rhs, lhs - rhs, tolerance, false, std::move(details)};
    r.pass = r.slack >= -tolerance;
    return r;
}

}  // namespace maxlab
