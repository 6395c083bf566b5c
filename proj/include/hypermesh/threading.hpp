#pragma once

namespace hypermesh {

/// Thread budget for OpenMP kernels. Reads HYPERMESH_THREADS once (0 or unset = auto).
int thread_count();

/// True when parallel kernels should split work (budget > 1 and n is large enough).
bool parallel_worthwhile(int n);

}  // namespace hypermesh
