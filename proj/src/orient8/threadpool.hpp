#pragma once

#include <functional>

namespace orient8 {

// Worker cap: ORIENT8_THREADS if set (>=1), else hardware concurrency.
int worker_count();

// Splits [0, n) into fixed-size chunks and runs fn(chunk_index, begin, end)
// for each. Chunk boundaries depend only on n and chunk_size, never on the
// worker count, so callers that write per-chunk outputs and reduce them in
// chunk order get identical results for any ORIENT8_THREADS value.
void parallel_chunks(int n, int chunk_size,
                     const std::function<void(int, int, int)>& fn);

}  // namespace orient8
