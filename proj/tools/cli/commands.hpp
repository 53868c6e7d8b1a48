#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "rankfolio/learners.hpp"

namespace rankfolio::cli {

/// Exit statuses shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `rankfolio` tool: `args` excludes the program name.
/// Learner names resolve against `registry`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err,
        const LearnerRegistry& registry);

/// Worker count from RANKFOLIO_THREADS (0 = sequential); hardware
/// concurrency when unset.
std::size_t worker_threads_from_env();

}  // namespace rankfolio::cli
