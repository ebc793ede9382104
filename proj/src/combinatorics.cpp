#include "dal/combinatorics.hpp"

#include <array>
#include <stdexcept>

namespace dal {
namespace {

struct SubsetTables {
  // by_size[n][k] lists masks; rank[n][mask] is the position in its list.
  std::array<std::array<std::vector<Mask>, kMaxDim + 1>, kMaxDim + 1> by_size;
  std::array<std::vector<std::uint32_t>, kMaxDim + 1> rank;

  SubsetTables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      rank[n].assign(std::size_t{1} << n, 0);
      for (int k = 0; k <= n; ++k) {
        // Lexicographic order of increasing tuples.
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
          Mask m = 0;
          for (int i : idx) m |= Mask{1} << i;
          rank[n][m] = static_cast<std::uint32_t>(by_size[n][k].size());
          by_size[n][k].push_back(m);
          int pos = k - 1;
          while (pos >= 0 && idx[pos] == n - k + pos) --pos;
          if (pos < 0) break;
          ++idx[pos];
          for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
      }
    }
  }
};

const SubsetTables& tables() {
  static const SubsetTables t;
  return t;
}

}  // namespace

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::span<const Mask> subsets(int n, int k) {
  if (n < 0 || n > kMaxDim || k < 0 || k > n) throw std::out_of_range("subsets: bad (n, k)");
  return tables().by_size[n][k];
}

std::size_t subset_rank(int n, Mask m) { return tables().rank[n][m]; }

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace dal
