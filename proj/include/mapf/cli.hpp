#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mapf {

// Exit codes: 0 success, 1 `validate` found an invalid solution, 2 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mapf
