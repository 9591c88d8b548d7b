#pragma once

#include "qmeasure/simd/kernels.hpp"

namespace qmeasure::simd::detail {

extern const KernelTable kScalarKernels;
#if defined(QMEASURE_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif

} // namespace qmeasure::simd::detail
