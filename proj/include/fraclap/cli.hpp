#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace fraclap {

/// Exit codes: 0 success, 1 validation error, 2 solver non-convergence,
/// 3 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace fraclap
