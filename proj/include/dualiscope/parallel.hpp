#pragma once

namespace dualiscope {

// Worker count resolution: explicit request > 0 wins, otherwise the
// DUALISCOPE_JOBS environment variable, otherwise the OpenMP default.
// Always >= 1. Every parallel kernel in the project takes a jobs argument
// and produces output identical to the serial path for any value.
int resolve_jobs(int requested = 0);

}  // namespace dualiscope
