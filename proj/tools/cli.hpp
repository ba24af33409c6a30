#pragma once

namespace usnl::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kData = 3;
inline constexpr int kDivergence = 4;

/// Entry point for the `usnl` binary; returns the process exit status.
int run(int argc, char** argv);

}  // namespace usnl::cli
