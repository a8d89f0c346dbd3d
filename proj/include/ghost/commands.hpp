#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ghost/errors.hpp"

namespace ghost {

struct CommandOptions {
    std::string scenario;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides [run] seed
    bool allow_defocus = false;         // or-ed with [run] allow_defocus
};

// 2 invalid input, 3 degenerate geometry, 4 sampling violation, 5 i/o.
int exit_code(ErrorKind kind);

// Runs one verb (solve, image, mc, rays, dual). Every input is validated and
// every output rendered in memory before the first file is written; files
// land via write-then-rename. Returns the process exit code.
int run_command(const std::string& verb, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ghost
