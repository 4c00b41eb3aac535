#include "fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gesturegan::detail {

void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Twiddles computed directly rather than by recurrence to keep
        // rounding error at the level of a single sin/cos.
        const std::complex<double> w(std::cos(ang * k), std::sin(ang * k));
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> power_spectrum(const std::vector<double>& frame, int n) {
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < frame.size() && i < buf.size(); ++i) buf[i] = frame[i];
  fft(buf);
  std::vector<double> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) out[k] = std::norm(buf[k]);
  return out;
}

}  // namespace gesturegan::detail
