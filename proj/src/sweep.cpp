#include "ringlab/sweep.hpp"

#include <omp.h>

extern "C" void openblas_set_num_threads(int);

namespace ringlab {

void init_runtime(int omp_threads) {
  if (omp_threads > 0) omp_set_num_threads(omp_threads);
  openblas_set_num_threads(1);
}

}  // namespace ringlab
