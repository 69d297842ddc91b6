#pragma once

#include <string>
#include <vector>

#include "losscape/formula.h"

namespace losscape::cli {

// Named example constraints: traffic, xor, hole, appendix-b1 and
// mnist-add:M,S (M classes per digit, target sum S).
Formula builtin_formula(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace losscape::cli
