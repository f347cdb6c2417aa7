#pragma once

namespace qsc {

// Caps the number of OpenMP threads used by the parallel kernels.
// A value <= 0 restores the runtime default.
void set_num_threads(int n);

// Reads QSC_THREADS from the environment and applies it when present.
void apply_thread_env();

int max_threads();

}  // namespace qsc
