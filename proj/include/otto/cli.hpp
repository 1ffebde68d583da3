#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace otto {

// Entry point of the `otto` executable. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otto
