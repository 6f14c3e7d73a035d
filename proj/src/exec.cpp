#include "philr/exec.hpp"

#include <omp.h>

namespace philr {

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace philr
