#pragma once

#include "mlnl/config.hpp"

namespace mlnl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitKernelDimension = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitIo = 4;

int cmd_ground_state(const RunConfig& config);
int cmd_fundamental(const RunConfig& config);
int cmd_landscape(const RunConfig& config);
int cmd_reduce(const RunConfig& config);
int cmd_verify(const RunConfig& config);

}  // namespace mlnl
