#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace dal {

/// Largest supported complex dimension.
inline constexpr int kMaxDim = 8;

using Mask = std::uint32_t;

/// Binomial coefficient for small arguments.
std::size_t binomial(int n, int k);

/// Subsets of {0..n-1} of size k, encoded as bitmasks, in lexicographic order
/// of their increasing index tuples.
std::span<const Mask> subsets(int n, int k);

/// Position of `m` within subsets(n, popcount(m)).
std::size_t subset_rank(int n, Mask m);

/// Sign of the permutation that sorts the concatenation of the ordered
/// generator lists `a` and `b` (disjoint masks). Returns +1 or -1.
inline int merge_sign(Mask a, Mask b) {
  int swaps = 0;
  while (b != 0) {
    const int low = std::countr_zero(b);
    swaps += std::popcount(a >> (low + 1));
    b &= b - 1;
  }
  return (swaps & 1) ? -1 : 1;
}

/// Sign picked up by removing generator `bit` from the front of the ordered
/// product encoded by `m`: (-1)^(number of generators in m before bit).
inline int contraction_sign(Mask m, int bit) {
  return (std::popcount(m & ((Mask{1} << bit) - 1)) & 1) ? -1 : 1;
}

double factorial(int k);

}  // namespace dal
