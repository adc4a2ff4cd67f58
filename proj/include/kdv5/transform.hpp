#ifndef KDV5_TRANSFORM_HPP
#define KDV5_TRANSFORM_HPP

#include <vector>

#include "kdv5/core.hpp"

namespace kdv5 {

/// In-place multi-dimensional complex DFT, row-major layout.
/// sign = +1: synthesis direction, data[j] <- sum_m c[m] e^{+2 pi i j.m / G}.
/// sign = -1: analysis direction, unnormalized (divide by the point count
/// to recover coefficients).  Plans are cached per (dims, sign).
void dft(std::vector<Complex>& data, const std::vector<int>& dims, int sign);

/// Smallest grid size >= n whose prime factors are all in {2,3,5,7}.
int fft_friendly(int n);

}  // namespace kdv5

#endif
