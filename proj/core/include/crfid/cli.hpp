#pragma once

#include <string>
#include <vector>

namespace crfid::cli {

// Full command-line surface: generate / train / predict / report. Returns the
// process exit code (0 success, 1 usage, 2 data/format, 3 numeric failure)
// and never throws. `args` excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace crfid::cli
