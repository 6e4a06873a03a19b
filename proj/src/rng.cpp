#include "stopkit/rng.hpp"

namespace stopkit {

double pairwiseSum(const double* data, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  std::size_t half = count / 2;
  return pairwiseSum(data, half) + pairwiseSum(data + half, count - half);
}

double pairwiseSum(const std::vector<double>& data) {
  return pairwiseSum(data.data(), data.size());
}

}  // namespace stopkit
