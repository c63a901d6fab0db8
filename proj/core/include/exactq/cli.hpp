#pragma once

#include <cstdint>
#include <string>

#include "exactq/distributions.hpp"

namespace exactq {

// Parse the kind:param[,param...] flag syntax:
//   exp:3  erlang:3,6  hyperexp:0.3,2,0.7,5  uniform:0.5,1.5  det:0.7
// hyperexp takes alternating weight,rate pairs.
DistributionSpec parse_distribution(const std::string& text);

// Entry point behind the exactq binary. Exit codes: 0 ok, 2 configuration
// error, 3 resource cap exceeded, 4 selftest failure, 1 other failure.
int run_cli(int argc, const char* const* argv);

}  // namespace exactq
