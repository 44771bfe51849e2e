#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>

namespace scatmaxp::fft {

enum class Direction { forward, inverse };

namespace detail {

// The FFTW planner is not re-entrant; execution of an existing plan with
// fftw_execute_dft is. Plans are created once per (shape, direction) and
// kept for the lifetime of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n0, std::size_t n1, Direction dir) {
    const auto key = std::make_tuple(n0, n1, dir == Direction::forward);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = n0 * n1;
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = n1 == 1 ? fftw_plan_dft_1d(static_cast<int>(n0), scratch, scratch, sign, flags)
                             : fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), scratch,
                                                scratch, sign, flags);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> plans_;
};

}  // namespace detail

/// In-place DFT of a row-major n0 x n1 array (n1 == 1 for 1D data).
/// The inverse is normalized by 1/(n0*n1), so inverse(forward(x)) == x.
inline void transform(std::span<std::complex<double>> data, std::size_t n0, std::size_t n1,
                      Direction dir) {
  fftw_plan plan = detail::PlanCache::instance().get(n0, n1, dir);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
  if (dir == Direction::inverse) {
    const double scale = 1.0 / static_cast<double>(n0 * n1);
    for (auto& v : data) v *= scale;
  }
}

}  // namespace scatmaxp::fft
