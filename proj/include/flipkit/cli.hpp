#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flipkit::cli {

/// Runs one command. Returns 0 on success, 1 on validation errors, 2 on numerical failures.
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flipkit::cli
