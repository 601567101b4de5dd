#pragma once

#include <ostream>

namespace revr {

// Entry point for the `revr` tool: render, score, eval and grpo-demo.
// Returns the process exit code; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace revr
