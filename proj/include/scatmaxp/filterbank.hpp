#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/grid.hpp"

namespace scatmaxp {

/// Morlet construction parameters, in units of the base grid spacing.
/// A non-positive slant means the conventional 4/L.
struct MorletParams {
  double sigma0 = 0.8;
  double xi0 = 0.75 * std::numbers::pi;
  double slant = 0.0;

  double resolved_slant(int L) const { return slant > 0.0 ? slant : 4.0 / static_cast<double>(L); }
};

/// One wavelet of the bank: scale index j in {0..J-1} (0 is the finest) and
/// rotation r in {0..L-1}, i.e. angle pi*r/L. In the continuous notation the
/// dilation exponent is -j, which lies in (-J, 0].
struct FilterIndex {
  int j = 0;
  int r = 0;

  int dilation_exponent() const noexcept { return -j; }
  friend auto operator<=>(const FilterIndex&, const FilterIndex&) = default;
};

/// Sample layout a filter is realized on. Only shape and spacing matter;
/// the plate origin does not affect a frequency response.
struct GridGeometry {
  int dim = 2;
  Extents shape{1, 1};
  Vec spacing{1.0, 1.0};

  static GridGeometry of(const Plate& p) { return {p.dim(), p.samples(), p.spacings()}; }

  bool matches(const Plate& p, double rel_tol = 1e-12) const noexcept {
    if (p.dim() != dim || p.samples() != shape) return false;
    for (int i = 0; i < dim; ++i)
      if (std::abs(p.spacing(i) - spacing[i]) > rel_tol * spacing[i]) return false;
    return true;
  }
  bool approx_equal(const GridGeometry& o, double rel_tol = 1e-12) const noexcept {
    if (o.dim != dim || o.shape != shape) return false;
    for (int i = 0; i < dim; ++i)
      if (std::abs(o.spacing[i] - spacing[i]) > rel_tol * spacing[i]) return false;
    return true;
  }
};

/// Filters realized on one grid. psi is indexed like FilterBank::indices().
struct FilterSet {
  GridGeometry grid;
  std::vector<Spectrum> psi;
  Spectrum phi;
};

enum class BankKind { morlet, exact_partition };

inline const char* to_string(BankKind k) { return k == BankKind::morlet ? "morlet" : "exact_partition"; }

namespace detail {

// Physical angular frequency of DFT bin k on an axis with n samples of
// spacing h (numpy fftfreq ordering).
inline double bin_frequency(std::size_t k, std::size_t n, double h) {
  const long kk = k <= (n - 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
  return 2.0 * std::numbers::pi * static_cast<double>(kk) / (static_cast<double>(n) * h);
}

// Gaussian envelope centred at xi * (cos theta, sin theta), periodized over
// neighbouring spectral copies of the sampled grid. Peak value 1 in the
// continuum.
struct Envelope {
  double sigma;
  double theta;
  double xi;
  double slant;

  double at(int dim, double w0, double w1, const Vec& period) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const int reach1 = dim == 2 ? 2 : 0;
    double sum = 0.0;
    for (int a = -2; a <= 2; ++a) {
      for (int b = -reach1; b <= reach1; ++b) {
        const double ux = w0 + a * period[0] - xi * c;
        const double uy = dim == 2 ? w1 + b * period[1] - xi * s : 0.0;
        const double along = c * ux + s * uy;
        const double across = -s * ux + c * uy;
        sum += std::exp(-0.5 * sigma * sigma * (along * along + across * across / (slant * slant)));
      }
    }
    return sum;
  }
};

inline Spectrum make_spectrum(const GridGeometry& g) {
  return Spectrum{g.dim, g.shape, std::vector<cplx>(g.shape[0] * g.shape[1])};
}

}  // namespace detail

/// Morlet (or exact-partition) wavelets plus Gaussian low-pass at scale 2^J.
///
/// Scales are fixed in physical units relative to the base grid spacing, so
/// the same bank can be realized on the shrunken plates that pooling
/// produces. `base()` is the realization on the grid the bank was built for.
class FilterBank {
 public:
  int J() const noexcept { return J_; }
  int L() const noexcept { return L_; }
  int dim() const noexcept { return base_.grid.dim; }
  BankKind kind() const noexcept { return kind_; }
  const MorletParams& params() const noexcept { return params_; }
  const std::vector<FilterIndex>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const FilterSet& base() const noexcept { return base_; }
  double reference_spacing() const noexcept { return href_; }

  std::size_t index_of(FilterIndex idx) const {
    if (idx.j < 0 || idx.j >= J_ || idx.r < 0 || idx.r >= L_)
      throw Error("filter index (j=" + std::to_string(idx.j) + ", r=" + std::to_string(idx.r) +
                  ") outside bank with J=" + std::to_string(J_) + ", L=" + std::to_string(L_));
    return static_cast<std::size_t>(idx.j * L_ + idx.r);
  }

  /// Physical width of the Gaussian low-pass.
  double lowpass_sigma() const noexcept { return params_.sigma0 * std::ldexp(1.0, J_) * href_; }

  FilterSet realize(const GridGeometry& g) const {
    if (g.dim != dim()) throw Error("cannot realize a " + std::to_string(dim()) + "D bank on a " +
                                    std::to_string(g.dim) + "D grid");
    if (g.approx_equal(base_.grid)) return base_;
    return kind_ == BankKind::morlet ? realize_morlet(g) : realize_partition(g);
  }

  friend FilterBank build_morlet_bank(int J, int L, const GridGeometry& grid, MorletParams params);
  friend FilterBank build_exact_partition_bank(int J, int L, const GridGeometry& grid);

 private:
  FilterBank(int J, int L, BankKind kind, MorletParams params, double href)
      : J_(J), L_(L), kind_(kind), params_(params), href_(href) {
    for (int j = 0; j < J; ++j)
      for (int r = 0; r < L; ++r) indices_.push_back({j, r});
  }

  FilterSet realize_morlet(const GridGeometry& g) const {
    const Vec period{2.0 * std::numbers::pi / g.spacing[0], 2.0 * std::numbers::pi / g.spacing[1]};
    const double slant = params_.resolved_slant(L_);
    FilterSet out{g, {}, detail::make_spectrum(g)};
    out.psi.reserve(indices_.size());
    for (const FilterIndex& idx : indices_) {
      const double scale = std::ldexp(1.0, idx.j);
      const double theta = std::numbers::pi * idx.r / L_;
      const detail::Envelope band{params_.sigma0 * scale * href_, theta, params_.xi0 / (scale * href_), slant};
      const detail::Envelope dc{band.sigma, theta, 0.0, slant};
      // Subtracting kappa times the DC-centred envelope makes the response
      // vanish at zero frequency.
      const double kappa = band.at(g.dim, 0.0, 0.0, period) / dc.at(g.dim, 0.0, 0.0, period);
      Spectrum s = detail::make_spectrum(g);
      for (std::size_t k0 = 0; k0 < g.shape[0]; ++k0) {
        const double w0 = detail::bin_frequency(k0, g.shape[0], g.spacing[0]);
        for (std::size_t k1 = 0; k1 < g.shape[1]; ++k1) {
          const double w1 = g.dim == 2 ? detail::bin_frequency(k1, g.shape[1], g.spacing[1]) : 0.0;
          s.data[k0 * g.shape[1] + k1] = band.at(g.dim, w0, w1, period) - kappa * dc.at(g.dim, w0, w1, period);
        }
      }
      out.psi.push_back(std::move(s));
    }
    const detail::Envelope low{lowpass_sigma(), 0.0, 0.0, 1.0};
    for (std::size_t k0 = 0; k0 < g.shape[0]; ++k0) {
      const double w0 = detail::bin_frequency(k0, g.shape[0], g.spacing[0]);
      for (std::size_t k1 = 0; k1 < g.shape[1]; ++k1) {
        const double w1 = g.dim == 2 ? detail::bin_frequency(k1, g.shape[1], g.spacing[1]) : 0.0;
        out.phi.data[k0 * g.shape[1] + k1] = low.at(g.dim, w0, w1, period);
      }
    }
    return out;
  }

  // Indicator bands in sup-norm frequency |w|_inf * href: the low-pass
  // covers [0, pi/2^J), wavelet j covers [pi/2^(j+1), pi/2^j) and j = 0
  // extends to the grid corners. Rotations split the upper half-plane into
  // L sectors. Wavelets carry sqrt(2) on their half-plane so that
  // (|psi(w)|^2 + |psi(-w)|^2)/2 sums to exactly one; self-conjugate bins
  // (w == -w on the grid) carry 1.
  FilterSet realize_partition(const GridGeometry& g) const {
    FilterSet out{g, {}, detail::make_spectrum(g)};
    for (std::size_t i = 0; i < indices_.size(); ++i) out.psi.push_back(detail::make_spectrum(g));
    const double pi = std::numbers::pi;
    for (std::size_t k0 = 0; k0 < g.shape[0]; ++k0) {
      const double w0 = detail::bin_frequency(k0, g.shape[0], g.spacing[0]);
      for (std::size_t k1 = 0; k1 < g.shape[1]; ++k1) {
        const double w1 = g.dim == 2 ? detail::bin_frequency(k1, g.shape[1], g.spacing[1]) : 0.0;
        const std::size_t at = k0 * g.shape[1] + k1;
        const double beta = std::max(std::abs(w0), std::abs(w1)) * href_;
        if (beta < pi / std::ldexp(1.0, J_)) {
          out.phi.data[at] = 1.0;
          continue;
        }
        int j = 0;
        while (j + 1 < J_ && beta < pi / std::ldexp(1.0, j + 1)) ++j;
        // Nyquist bins are their own mirror on that axis, so they break no
        // ties; the half-plane is decided on the other axis.
        const bool nyq0 = (g.shape[0] - k0) % g.shape[0] == k0;
        const bool nyq1 = (g.shape[1] - k1) % g.shape[1] == k1;
        const double s0 = nyq0 ? 0.0 : w0, s1 = nyq1 ? 0.0 : w1;
        const bool upper = s1 > 0.0 || (s1 == 0.0 && s0 > 0.0);
        const double a0 = upper ? w0 : -w0;
        const double a1 = upper ? w1 : -w1;
        int r = 0;
        if (g.dim == 2) {
          const double angle = std::atan2(a1, a0);
          r = std::clamp(static_cast<int>(std::floor(angle * L_ / pi)), 0, L_ - 1);
        }
        const bool self_conjugate = nyq0 && nyq1;
        const std::size_t li = static_cast<std::size_t>(j * L_ + r);
        if (self_conjugate) out.psi[li].data[at] = 1.0;
        else if (upper) out.psi[li].data[at] = std::sqrt(2.0);
      }
    }
    return out;
  }

  int J_;
  int L_;
  BankKind kind_;
  MorletParams params_;
  double href_;
  std::vector<FilterIndex> indices_;
  FilterSet base_;
};

namespace detail {

inline void validate_bank_args(int J, int L, const GridGeometry& grid) {
  if (J < 1) throw Error("J must be at least 1");
  if (L < 1) throw Error("L must be at least 1");
  if (grid.dim != 1 && grid.dim != 2) throw Error("grid dimension must be 1 or 2");
  if (grid.dim == 1 && L != 1) throw Error("1D banks have a single orientation (L must be 1)");
  const std::size_t step = std::size_t{1} << J;
  for (int i = 0; i < grid.dim; ++i) {
    if (grid.shape[i] == 0 || grid.shape[i] % step != 0)
      throw Error("grid axis " + std::to_string(i) + " has " + std::to_string(grid.shape[i]) +
                  " samples, which is not divisible by 2^J = " + std::to_string(step));
    if (!(grid.spacing[i] > 0.0)) throw Error("grid spacing must be positive");
  }
}

}  // namespace detail

inline FilterBank build_morlet_bank(int J, int L, const GridGeometry& grid, MorletParams params = {}) {
  detail::validate_bank_args(J, L, grid);
  GridGeometry g = grid;
  if (g.dim == 1) {
    g.shape[1] = 1;
    g.spacing[1] = 1.0;
  }
  FilterBank bank(J, L, BankKind::morlet, params, g.spacing[0]);
  bank.base_ = bank.realize_morlet(g);
  return bank;
}

inline FilterBank build_morlet_bank(int J, int L, const Plate& plate, MorletParams params = {}) {
  return build_morlet_bank(J, L, GridGeometry::of(plate), params);
}

/// Test fixture whose Littlewood-Paley sum is identically one.
inline FilterBank build_exact_partition_bank(int J, int L, const GridGeometry& grid) {
  detail::validate_bank_args(J, L, grid);
  GridGeometry g = grid;
  if (g.dim == 1) {
    g.shape[1] = 1;
    g.spacing[1] = 1.0;
  }
  FilterBank bank(J, L, BankKind::exact_partition, MorletParams{}, g.spacing[0]);
  bank.base_ = bank.realize_partition(g);
  return bank;
}

inline FilterBank build_exact_partition_bank(int J, int L, const Plate& plate) {
  return build_exact_partition_bank(J, L, GridGeometry::of(plate));
}

/// Range of A(w) = |phi(w)|^2 + 1/2 sum (|psi(w)|^2 + |psi(-w)|^2) over the
/// grid, and the worst deviation from one.
struct FrameBounds {
  double lower = 1.0;
  double upper = 1.0;
  double defect = 0.0;
};

inline FrameBounds littlewood_paley_bounds(const FilterSet& set) {
  const Extents& n = set.grid.shape;
  FrameBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k0 = 0; k0 < n[0]; ++k0) {
    const std::size_t m0 = (n[0] - k0) % n[0];
    for (std::size_t k1 = 0; k1 < n[1]; ++k1) {
      const std::size_t m1 = (n[1] - k1) % n[1];
      const std::size_t at = k0 * n[1] + k1, mirror = m0 * n[1] + m1;
      double wave = 0.0;
      for (const Spectrum& psi : set.psi) wave += std::norm(psi.data[at]) + std::norm(psi.data[mirror]);
      const double a = std::norm(set.phi.data[at]) + 0.5 * wave;
      b.lower = std::min(b.lower, a);
      b.upper = std::max(b.upper, a);
      b.defect = std::max(b.defect, std::abs(1.0 - a));
    }
  }
  return b;
}

inline double frame_defect(const FilterSet& set) { return littlewood_paley_bounds(set).defect; }
inline double frame_defect(const FilterBank& bank) { return frame_defect(bank.base()); }

/// max over grid frequencies of |phi_hat(w)| * |w|, with w in physical units.
inline double theorem_constant_B(const Spectrum& phi_hat, const Vec& spacing) {
  double best = 0.0;
  for (std::size_t k0 = 0; k0 < phi_hat.shape[0]; ++k0) {
    const double w0 = detail::bin_frequency(k0, phi_hat.shape[0], spacing[0]);
    for (std::size_t k1 = 0; k1 < phi_hat.shape[1]; ++k1) {
      const double w1 = phi_hat.dim == 2 ? detail::bin_frequency(k1, phi_hat.shape[1], spacing[1]) : 0.0;
      best = std::max(best, std::abs(phi_hat(k0, k1)) * std::hypot(w0, w1));
    }
  }
  return best;
}

inline double theorem_constant_B(const FilterBank& bank) {
  return theorem_constant_B(bank.base().phi, bank.base().grid.spacing);
}

/// Largest |psi_hat| over every wavelet of a realization.
inline double max_wavelet_gain(const FilterSet& set) {
  double m = 0.0;
  for (const Spectrum& psi : set.psi)
    for (const cplx& v : psi.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace scatmaxp
