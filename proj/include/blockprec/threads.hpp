#pragma once

namespace blockprec {

// Thread budget: min(BLOCKPREC_THREADS, hardware/OpenMP default); 0 or unset
// means no cap.
int thread_cap();

// Applies the cap to the OpenMP runtime. Call once at program start.
void apply_thread_cap();

}  // namespace blockprec
