#pragma once

namespace effbudget::cli {

// Exit status: 0 success, 1 validation or usage error, 2 solver error.
int run(int argc, char** argv);

}  // namespace effbudget::cli
