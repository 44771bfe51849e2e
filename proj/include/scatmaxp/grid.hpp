#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/fft.hpp"

namespace scatmaxp {

using cplx = std::complex<double>;
using Vec = std::array<double, 2>;
using Extents = std::array<std::size_t, 2>;
using Offsets = std::array<long, 2>;

inline constexpr int kMaxDim = 2;

namespace detail {

inline std::string format_extents(const Extents& e, int dim) {
  std::ostringstream os;
  os << e[0];
  if (dim == 2) os << 'x' << e[1];
  return os.str();
}

// Index of the nearest integer to `x` if `x` is within `tol` of it.
inline bool near_integer(double x, double tol, long& out) {
  const double r = std::round(x);
  if (std::abs(x - r) > tol * std::max(1.0, std::abs(x))) return false;
  out = static_cast<long>(r);
  return true;
}

inline std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  long r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace detail

/// Axis-aligned rectangle carrying a uniform, cell-centered sample grid.
///
/// Sample index n on axis i sits at origin[i] + (n + 1/2) * spacing(i).
/// One-dimensional plates keep a dummy second axis with a single sample so
/// that all loops can run over two axes.
class Plate {
 public:
  Plate(int dim, Vec origin, Vec side_lengths, Extents samples)
      : dim_(dim), origin_(origin), sides_(side_lengths), samples_(samples) {
    if (dim_ < 1 || dim_ > kMaxDim) throw Error("plate dimension must be 1 or 2");
    for (int i = 0; i < dim_; ++i) {
      if (!(sides_[i] > 0.0) || !std::isfinite(sides_[i]))
        throw Error("plate side lengths must be positive");
      if (samples_[i] < 1) throw Error("plate needs at least one sample per axis");
      if (!std::isfinite(origin_[i])) throw Error("plate origin must be finite");
    }
    if (dim_ == 1) {
      origin_[1] = 0.0;
      sides_[1] = 1.0;
      samples_[1] = 1;
    }
  }

  static Plate line(double origin, double length, std::size_t n) {
    return Plate(1, {origin, 0.0}, {length, 1.0}, {n, 1});
  }
  static Plate rect(Vec origin, Vec sides, Extents samples) {
    return Plate(2, origin, sides, samples);
  }
  /// [0,1]^2 with n0 x n1 samples.
  static Plate unit_square(std::size_t n0, std::size_t n1) {
    return rect({0.0, 0.0}, {1.0, 1.0}, {n0, n1});
  }

  int dim() const noexcept { return dim_; }
  const Vec& origin() const noexcept { return origin_; }
  const Vec& side_lengths() const noexcept { return sides_; }
  const Extents& samples() const noexcept { return samples_; }
  std::size_t extent(int axis) const noexcept { return samples_[axis]; }
  std::size_t sample_count() const noexcept { return samples_[0] * samples_[1]; }

  double spacing(int axis) const noexcept {
    return sides_[axis] / static_cast<double>(samples_[axis]);
  }
  Vec spacings() const noexcept { return {spacing(0), spacing(1)}; }

  double cell_volume() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= spacing(i);
    return v;
  }
  double measure() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= sides_[i];
    return v;
  }

  bool contains_zero() const noexcept {
    for (int i = 0; i < dim_; ++i)
      if (!(origin_[i] <= 0.0 && 0.0 <= origin_[i] + sides_[i])) return false;
    return true;
  }

  double coordinate(int axis, std::size_t n) const noexcept {
    return origin_[axis] + (static_cast<double>(n) + 0.5) * spacing(axis);
  }

  Plate with_origin(Vec origin) const { return Plate(dim_, origin, sides_, samples_); }

  /// Same sample counts and extents up to a relative tolerance; origin ignored.
  bool same_grid(const Plate& other, double rel_tol = 1e-12) const noexcept {
    if (dim_ != other.dim_ || samples_ != other.samples_) return false;
    for (int i = 0; i < dim_; ++i)
      if (std::abs(sides_[i] - other.sides_[i]) > rel_tol * sides_[i]) return false;
    return true;
  }

  bool approx_equal(const Plate& other, double rel_tol = 1e-12) const noexcept {
    if (!same_grid(other, rel_tol)) return false;
    for (int i = 0; i < dim_; ++i)
      if (std::abs(origin_[i] - other.origin_[i]) > rel_tol * sides_[i]) return false;
    return true;
  }

  friend bool operator==(const Plate&, const Plate&) = default;

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "plate[d=" << dim_ << " origin=(" << origin_[0];
    if (dim_ == 2) os << ',' << origin_[1];
    os << ") sides=(" << sides_[0];
    if (dim_ == 2) os << ',' << sides_[1];
    os << ") samples=" << detail::format_extents(samples_, dim_) << ']';
    return os.str();
  }

 private:
  int dim_;
  Vec origin_;
  Vec sides_;
  Extents samples_;
};

/// Frequency-domain array laid out like the DFT of a grid (index 0 is DC).
struct Spectrum {
  int dim = 2;
  Extents shape{1, 1};
  std::vector<cplx> data;

  std::size_t size() const noexcept { return data.size(); }
  cplx operator()(std::size_t k0, std::size_t k1 = 0) const { return data[k0 * shape[1] + k1]; }
};

/// Sampled complex function on a plate, stored row-major.
class SignalGrid {
 public:
  explicit SignalGrid(Plate plate) : plate_(std::move(plate)), values_(plate_.sample_count()) {}

  SignalGrid(Plate plate, std::vector<cplx> values)
      : plate_(std::move(plate)), values_(std::move(values)) {
    if (values_.size() != plate_.sample_count())
      throw Error("signal has " + std::to_string(values_.size()) + " values but " +
                  plate_.describe() + " needs " + std::to_string(plate_.sample_count()));
  }

  static SignalGrid from_real(Plate plate, std::span<const double> values) {
    std::vector<cplx> v(values.begin(), values.end());
    return SignalGrid(std::move(plate), std::move(v));
  }

  const Plate& plate() const noexcept { return plate_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator()(std::size_t i0, std::size_t i1 = 0) const {
    return values_[i0 * plate_.extent(1) + i1];
  }

  std::vector<cplx> release() && { return std::move(values_); }

  /// Bit-identical values (plates compared separately).
  bool same_values(const SignalGrid& other) const noexcept {
    if (values_.size() != other.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i].real() != other.values_[i].real() ||
          values_[i].imag() != other.values_[i].imag())
        return false;
    }
    return true;
  }

 private:
  Plate plate_;
  std::vector<cplx> values_;
};

/// Riemann approximation of the continuous L2 norm.
inline double l2_norm_squared(const SignalGrid& f) {
  double sum = 0.0;
  for (const cplx& v : f.values()) sum += std::norm(v);
  return sum * f.plate().cell_volume();
}

inline double l2_norm(const SignalGrid& f) { return std::sqrt(l2_norm_squared(f)); }

inline double linf_norm(const SignalGrid& f) {
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Circular shift by whole samples on the same plate: out[n] = f[n - c].
inline SignalGrid translate_in_plate(const SignalGrid& f, Offsets c) {
  const Plate& p = f.plate();
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= p.dim() && c[i] != 0) throw Error("offset given for a missing axis");
    if (std::abs(c[i]) >= static_cast<long>(p.extent(i)))
      throw Error("circular offset " + std::to_string(c[i]) + " out of range for axis " +
                  std::to_string(i) + " with " + std::to_string(p.extent(i)) + " samples");
  }
  const std::size_t n0 = p.extent(0), n1 = p.extent(1);
  std::vector<cplx> out(f.size());
  for (std::size_t i0 = 0; i0 < n0; ++i0) {
    const std::size_t s0 = detail::wrap(static_cast<long>(i0) - c[0], n0);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      const std::size_t s1 = detail::wrap(static_cast<long>(i1) - c[1], n1);
      out[i0 * n1 + i1] = f(s0, s1);
    }
  }
  return SignalGrid(p, std::move(out));
}

/// Sample offsets equivalent to a physical shift, or an error if the shift
/// is not a whole number of samples on every axis.
inline Offsets aligned_offsets(const Plate& p, const Vec& c, double tol = 1e-9) {
  Offsets out{0, 0};
  for (int i = 0; i < p.dim(); ++i) {
    long k = 0;
    if (!detail::near_integer(c[i] / p.spacing(i), tol, k)) {
      std::ostringstream os;
      os.precision(17);
      os << "shift " << c[i] << " on axis " << i << " is not a multiple of the sample spacing "
         << p.spacing(i);
      throw Error(os.str());
    }
    out[i] = k;
  }
  return out;
}

/// T_c: moves the function together with its plate. Values are untouched.
inline SignalGrid translate_with_plate(const SignalGrid& f, const Vec& c) {
  const Plate& p = f.plate();
  aligned_offsets(p, c);
  Vec origin = p.origin();
  for (int i = 0; i < p.dim(); ++i) origin[i] += c[i];
  Plate moved = p.with_origin(origin);
  if (!moved.contains_zero()) throw Error("translated plate " + moved.describe() + " does not contain 0");
  std::vector<cplx> v(f.values().begin(), f.values().end());
  return SignalGrid(std::move(moved), std::move(v));
}

/// Re-expresses a signal living on a translate of `target` on `target`
/// itself, treating both as periodic over their plates.
inline SignalGrid realign_periodic(const SignalGrid& g, const Plate& target) {
  const Plate& p = g.plate();
  if (!p.same_grid(target)) throw Error("cannot realign " + p.describe() + " onto " + target.describe());
  Vec delta{0.0, 0.0};
  for (int i = 0; i < p.dim(); ++i) delta[i] = p.origin()[i] - target.origin()[i];
  Offsets s = aligned_offsets(p, delta);
  for (int i = 0; i < p.dim(); ++i) s[i] %= static_cast<long>(p.extent(i));
  SignalGrid shifted = translate_in_plate(g, s);
  return SignalGrid(target, std::move(shifted).release());
}

inline Spectrum spectrum(const SignalGrid& f) {
  const Plate& p = f.plate();
  Spectrum s{p.dim(), p.samples(), std::vector<cplx>(f.values().begin(), f.values().end())};
  fft::transform(s.data, p.extent(0), p.extent(1), fft::Direction::forward);
  return s;
}

namespace detail {

inline void check_kernel(const Plate& p, const Spectrum& k) {
  if (k.shape != p.samples() || k.data.size() != p.sample_count())
    throw Error("kernel shape " + format_extents(k.shape, k.dim) + " does not match signal shape " +
                format_extents(p.samples(), p.dim()));
}

}  // namespace detail

/// Circular convolution through the DFT: ifft(fft(f) * kernel_hat).
inline SignalGrid convolve(const SignalGrid& f, const Spectrum& kernel_hat) {
  const Plate& p = f.plate();
  detail::check_kernel(p, kernel_hat);
  std::vector<cplx> buf(f.values().begin(), f.values().end());
  fft::transform(buf, p.extent(0), p.extent(1), fft::Direction::forward);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= kernel_hat.data[i];
  fft::transform(buf, p.extent(0), p.extent(1), fft::Direction::inverse);
  return SignalGrid(p, std::move(buf));
}

/// Spatial taps of a frequency-domain kernel.
inline std::vector<cplx> spatial_kernel(const Spectrum& kernel_hat) {
  std::vector<cplx> k = kernel_hat.data;
  fft::transform(k, kernel_hat.shape[0], kernel_hat.shape[1], fft::Direction::inverse);
  return k;
}

/// Circular convolution summed tap by tap in kernel-offset order:
/// out[n] = sum_t k[t] f[n - t]. Every output sample sees the same sequence
/// of operations regardless of where the input sits, so the result commutes
/// bit-exactly with circular shifts. O(N^2); meant for small grids.
inline SignalGrid convolve_direct(const SignalGrid& f, const Spectrum& kernel_hat) {
  const Plate& p = f.plate();
  detail::check_kernel(p, kernel_hat);
  const std::vector<cplx> k = spatial_kernel(kernel_hat);
  const std::size_t n0 = p.extent(0), n1 = p.extent(1);
  std::vector<double> fre(f.size()), fim(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    fre[i] = f.values()[i].real();
    fim[i] = f.values()[i].imag();
  }
  std::vector<double> ore(f.size(), 0.0), oim(f.size(), 0.0);
  for (std::size_t t0 = 0; t0 < n0; ++t0) {
    for (std::size_t t1 = 0; t1 < n1; ++t1) {
      const double kr = k[t0 * n1 + t1].real();
      const double ki = k[t0 * n1 + t1].imag();
      for (std::size_t i0 = 0; i0 < n0; ++i0) {
        const std::size_t s0 = (i0 + n0 - t0) % n0;
        const double* ar = fre.data() + s0 * n1;
        const double* ai = fim.data() + s0 * n1;
        double* outr = ore.data() + i0 * n1;
        double* outi = oim.data() + i0 * n1;
        // Columns i1 >= t1 read a[i1 - t1]; the rest wrap around.
        for (std::size_t i1 = t1; i1 < n1; ++i1) {
          const double xr = ar[i1 - t1], xi = ai[i1 - t1];
          outr[i1] += kr * xr - ki * xi;
          outi[i1] += kr * xi + ki * xr;
        }
        for (std::size_t i1 = 0; i1 < t1; ++i1) {
          const double xr = ar[i1 + n1 - t1], xi = ai[i1 + n1 - t1];
          outr[i1] += kr * xr - ki * xi;
          outi[i1] += kr * xi + ki * xr;
        }
      }
    }
  }
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {ore[i], oim[i]};
  return SignalGrid(p, std::move(out));
}

/// Samplewise |f|, stored with zero imaginary part.
inline SignalGrid modulus(const SignalGrid& f) {
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(f.values()[i]);
  return SignalGrid(f.plate(), std::move(out));
}

/// Keeps the leading `keep` samples per axis; the plate shrinks accordingly.
inline SignalGrid crop(const SignalGrid& f, Extents keep) {
  const Plate& p = f.plate();
  Vec sides = p.side_lengths();
  for (int i = 0; i < p.dim(); ++i) {
    if (keep[i] < 1 || keep[i] > p.extent(i)) throw Error("crop extent out of range");
    sides[i] = p.spacing(i) * static_cast<double>(keep[i]);
  }
  if (p.dim() == 1) keep[1] = 1;
  std::vector<cplx> out(keep[0] * keep[1]);
  for (std::size_t i0 = 0; i0 < keep[0]; ++i0)
    for (std::size_t i1 = 0; i1 < keep[1]; ++i1) out[i0 * keep[1] + i1] = f(i0, i1);
  return SignalGrid(Plate(p.dim(), p.origin(), sides, keep), std::move(out));
}

/// Keeps every `step`-th sample per axis (starting at 0) on the same plate.
inline SignalGrid subsample(const SignalGrid& f, std::size_t step) {
  const Plate& p = f.plate();
  if (step == 0) throw Error("subsampling step must be positive");
  Extents n = p.samples();
  for (int i = 0; i < p.dim(); ++i) {
    if (n[i] % step != 0)
      throw Error("cannot subsample " + std::to_string(n[i]) + " samples by " + std::to_string(step));
    n[i] /= step;
  }
  std::vector<cplx> out(n[0] * n[1]);
  const std::size_t step1 = p.dim() == 2 ? step : 1;
  for (std::size_t i0 = 0; i0 < n[0]; ++i0)
    for (std::size_t i1 = 0; i1 < n[1]; ++i1) out[i0 * n[1] + i1] = f(i0 * step, i1 * step1);
  return SignalGrid(Plate(p.dim(), p.origin(), p.side_lengths(), n), std::move(out));
}

inline SignalGrid subtract(const SignalGrid& a, const SignalGrid& b) {
  if (!a.plate().same_grid(b.plate())) throw Error("cannot subtract signals on different grids");
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return SignalGrid(a.plate(), std::move(out));
}

}  // namespace scatmaxp
