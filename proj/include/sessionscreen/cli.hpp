#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sessionscreen {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 success, 1 module error, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace sessionscreen
