#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "fluocnn/error.hpp"

namespace fluocnn::app {

enum ExitCode : int { kOk = 0, kInternal = 1, kInputError = 2, kEmptyResult = 3 };

int exit_code_for(ErrorKind kind);

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fluocnn::app
