#pragma once

#include <string>
#include <vector>

#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"

namespace olpsynth {

struct Violation {
    std::string layer;
    std::string rule;    // short stable identifier, e.g. "channel mismatch"
    std::string detail;
};

/// Checks every model and parameter invariant. Empty result means consistent.
std::vector<Violation> validate(const NetworkModel& model, const ParameterSet& params);

/// validate() that throws Error listing the violations.
void require_valid(const NetworkModel& model, const ParameterSet& params);

}  // namespace olpsynth
