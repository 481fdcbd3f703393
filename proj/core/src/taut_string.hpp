#pragma once

#include <cstddef>
#include <vector>

namespace advrisk::detail {

/// Attacked masses from the taut string through the corridor of cumulative
/// sums G0, G1 with F(j-k) <= G(j) <= F(j+k).
struct BandPath {
  std::vector<long double> g0;  // cumulative attacked P0 mass after cell j
  std::vector<long double> g1;
  std::vector<double> eta;      // slope dG1/d(G0+G1) of the string over cell j
  std::vector<unsigned char> zero;
  std::size_t vertices = 0;
};

BandPath taut_band_path(const std::vector<double>& m0, const std::vector<double>& m1, std::size_t k);

/// Monotone (quantile) transport of masses `from` onto cumulative targets `g`.
/// Calls emit(i, j, w) for every positive overlap.
template <class Emit>
void monotone_transport(const std::vector<long double>& f, const std::vector<long double>& g, Emit emit) {
  const std::size_t n = f.size();
  std::size_t i = 0, j = 0;
  long double prev = 0.0L;
  while (i < n && j < n) {
    const long double cut = f[i] < g[j] ? f[i] : g[j];
    if (cut > prev) emit(i, j, static_cast<double>(cut - prev));
    prev = cut > prev ? cut : prev;
    if (f[i] <= g[j]) ++i;
    else ++j;
  }
}

}  // namespace advrisk::detail
