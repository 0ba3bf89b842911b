#pragma once

#include <algorithm>
#include <vector>

namespace nsblowup {

/// Tensor wavelet index (epsilon, j, k); epsilon holds one 0/1 flag per axis.
struct WaveletIndex {
  std::vector<int> epsilon;
  int j = 0;
  std::vector<long> k;

  bool is_wavelet() const { return std::any_of(epsilon.begin(), epsilon.end(), [](int e) { return e != 0; }); }
  bool operator==(const WaveletIndex&) const = default;
};

}  // namespace nsblowup
