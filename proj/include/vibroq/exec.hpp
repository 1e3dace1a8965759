#pragma once

namespace vibroq {

/// Execution mode for the data-parallel kernels. Serial and Parallel run the
/// same per-element code; results are bit-identical between the two.
enum class ExecMode { Serial, Parallel };

}
