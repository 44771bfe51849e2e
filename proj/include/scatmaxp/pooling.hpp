#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/grid.hpp"

namespace scatmaxp {

/// Congruent axis-aligned split of a plate into blocks[0] x blocks[1]
/// sub-plates, each holding a whole number of samples.
class PlatePartition {
 public:
  const Plate& parent() const noexcept { return parent_; }
  const Extents& blocks() const noexcept { return blocks_; }
  std::size_t count() const noexcept { return blocks_[0] * blocks_[1]; }

  /// Samples per sub-plate along each axis.
  Extents block_extent() const noexcept {
    return {parent_.extent(0) / blocks_[0], parent_.extent(1) / blocks_[1]};
  }

  /// Sub-plate i in row-major block order.
  Plate sub_plate(std::size_t i) const {
    if (i >= count()) throw Error("sub-plate index out of range");
    const std::size_t b0 = i / blocks_[1], b1 = i % blocks_[1];
    const Extents e = block_extent();
    Vec origin = parent_.origin();
    Vec sides = parent_.side_lengths();
    origin[0] += static_cast<double>(b0 * e[0]) * parent_.spacing(0);
    sides[0] = static_cast<double>(e[0]) * parent_.spacing(0);
    if (parent_.dim() == 2) {
      origin[1] += static_cast<double>(b1 * e[1]) * parent_.spacing(1);
      sides[1] = static_cast<double>(e[1]) * parent_.spacing(1);
    }
    return Plate(parent_.dim(), origin, sides, e);
  }

  friend PlatePartition partition_plate(const Plate& plate, Extents blocks);

 private:
  PlatePartition(Plate parent, Extents blocks) : parent_(std::move(parent)), blocks_(blocks) {}

  Plate parent_;
  Extents blocks_;
};

inline PlatePartition partition_plate(const Plate& plate, Extents blocks) {
  if (plate.dim() == 1) blocks[1] = 1;
  for (int i = 0; i < plate.dim(); ++i) {
    if (blocks[i] < 1) throw Error("block count must be positive");
    if (plate.extent(i) % blocks[i] != 0)
      throw Error("axis " + std::to_string(i) + " has " + std::to_string(plate.extent(i)) +
                  " samples, not divisible into " + std::to_string(blocks[i]) + " blocks");
  }
  return PlatePartition(plate, blocks);
}

/// Partition into blocks of `window` samples per axis (the usual strided
/// max-pool footprint).
inline PlatePartition partition_by_window(const Plate& plate, std::size_t window) {
  Extents blocks{1, 1};
  for (int i = 0; i < plate.dim(); ++i) {
    if (window == 0 || plate.extent(i) % window != 0)
      throw Error("axis " + std::to_string(i) + " has " + std::to_string(plate.extent(i)) +
                  " samples, not divisible by pooling window " + std::to_string(window));
    blocks[i] = plate.extent(i) / window;
  }
  return partition_plate(plate, blocks);
}

/// Smallest pooling factor the definition admits:
/// (|D| * ||f||_inf / ||f||_2)^(1/d), with the threshold taken as printed.
inline double min_admissible_factor(const SignalGrid& f) {
  const double l2 = l2_norm(f);
  if (!(l2 > 0.0)) throw Error("admissibility threshold undefined for the zero signal");
  const double ratio = f.plate().measure() * linf_norm(f) / l2;
  return std::pow(ratio, 1.0 / f.plate().dim());
}

enum class Admissibility { off, warn, strict };

inline const char* to_string(Admissibility a) {
  switch (a) {
    case Admissibility::off: return "off";
    case Admissibility::warn: return "warn";
    case Admissibility::strict: return "strict";
  }
  return "?";
}

struct PoolOutcome {
  SignalGrid signal;
  double threshold = 0.0;  // 0 when not evaluated or f == 0
  bool admissible = true;
};

/// Continuous max-pooling: the sub-plate D(i) maps to D(i)/S and carries
/// the maximum of |f| over its samples. The output plate is D/S sampled with
/// one cell per sub-plate image.
inline PoolOutcome max_pool_checked(const SignalGrid& f, const PlatePartition& partition, double S,
                                    Admissibility mode = Admissibility::warn) {
  const Plate& p = f.plate();
  if (!(partition.parent() == p))
    throw Error("partition of " + partition.parent().describe() + " does not match signal " + p.describe());
  if (!(S >= 1.0) || !std::isfinite(S)) throw Error("pooling factor must be at least 1");

  PoolOutcome out{SignalGrid(p), 0.0, true};
  if (mode != Admissibility::off && linf_norm(f) > 0.0) {
    out.threshold = min_admissible_factor(f);
    out.admissible = S > out.threshold;
    if (!out.admissible && mode == Admissibility::strict) {
      std::ostringstream os;
      os.precision(17);
      os << "pooling factor S=" << S << " is not admissible: requires S > " << out.threshold;
      throw AdmissibilityError(os.str(), out.threshold, S);
    }
  }

  const Extents blocks = partition.blocks();
  const Extents e = partition.block_extent();
  const std::size_t n1 = p.extent(1);
  std::vector<cplx> pooled(blocks[0] * blocks[1]);
  for (std::size_t b0 = 0; b0 < blocks[0]; ++b0) {
    for (std::size_t b1 = 0; b1 < blocks[1]; ++b1) {
      double m = 0.0;
      for (std::size_t i0 = b0 * e[0]; i0 < (b0 + 1) * e[0]; ++i0)
        for (std::size_t i1 = b1 * e[1]; i1 < (b1 + 1) * e[1]; ++i1)
          m = std::max(m, std::abs(f.values()[i0 * n1 + i1]));
      pooled[b0 * blocks[1] + b1] = m;
    }
  }
  Vec origin = p.origin(), sides = p.side_lengths();
  for (int i = 0; i < p.dim(); ++i) {
    origin[i] /= S;
    sides[i] /= S;
  }
  out.signal = SignalGrid(Plate(p.dim(), origin, sides, blocks), std::move(pooled));
  return out;
}

inline SignalGrid max_pool(const SignalGrid& f, const PlatePartition& partition, double S,
                           Admissibility mode = Admissibility::warn) {
  return max_pool_checked(f, partition, S, mode).signal;
}

/// Strided block max over `window` samples per axis, dropping trailing
/// samples that do not fill a whole block. The output keeps the sample
/// spacing (S equals the window).
inline SignalGrid max_pool_truncating(const SignalGrid& f, std::size_t window) {
  const Plate& p = f.plate();
  Extents keep = p.samples();
  for (int i = 0; i < p.dim(); ++i) {
    keep[i] = (keep[i] / window) * window;
    if (keep[i] == 0)
      throw Error("axis " + std::to_string(i) + " has " + std::to_string(p.extent(i)) +
                  " samples, fewer than the pooling window " + std::to_string(window));
  }
  const SignalGrid cropped = keep == p.samples() ? f : crop(f, keep);
  return max_pool(cropped, partition_by_window(cropped.plate(), window), static_cast<double>(window),
                  Admissibility::off);
}

}  // namespace scatmaxp
