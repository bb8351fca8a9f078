#include "evortex/fft.hpp"

#include "evortex/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace evortex::detail {

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, bool, bool>, fftw_plan> g_plans;

fftw_plan plan_for(int n, bool forward, bool two_dim) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(n, forward, two_dim);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  // FFTW_UNALIGNED lets the cached plan execute on any buffer.
  fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(n) * (two_dim ? n : 1));
  const int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan p = two_dim
                    ? fftw_plan_dft_2d(n, n, tmp, tmp, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                    : fftw_plan_dft_1d(n, tmp, tmp, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(tmp);
  if (!p) throw sampling_error("FFTW plan creation failed");
  g_plans.emplace(key, p);
  return p;
}

} // namespace

void fft2_inplace(std::complex<double>* data, int n, bool forward) {
  fftw_plan p = plan_for(n, forward, true);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, raw, raw);
}

void fft1_inplace(std::complex<double>* data, int n, bool forward) {
  fftw_plan p = plan_for(n, forward, false);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, raw, raw);
}

void fftshift_inplace(std::complex<double>* data, int n) {
  const int h = n / 2;
  for (int y = 0; y < h; ++y) {
    auto* row_a = data + static_cast<std::size_t>(y) * n;
    auto* row_b = data + static_cast<std::size_t>(y + h) * n;
    for (int x = 0; x < h; ++x) {
      std::swap(row_a[x], row_b[x + h]);
      std::swap(row_a[x + h], row_b[x]);
    }
  }
}

} // namespace evortex::detail
