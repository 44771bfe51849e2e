#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/scattering.hpp"

namespace scatmaxp {

/// Width of each hidden layer of the dense classifier head.
inline const std::vector<std::size_t> kDefaultHeadWidths{512, 512, 256, 256};

/// Weights plus biases of a fully connected stack
/// features -> widths[0] -> ... -> widths.back() -> classes.
inline std::uint64_t dense_head_parameters(std::uint64_t features, const std::vector<std::size_t>& widths,
                                           std::uint64_t classes) {
  std::uint64_t total = 0, in = features;
  for (std::size_t w : widths) {
    total += in * w + w;
    in = w;
  }
  return total + in * classes + classes;
}

struct FeatureSummary {
  std::vector<std::size_t> layer_paths;
  std::vector<std::size_t> layer_coefficients;
  std::uint64_t feature_dim = 0;
  std::uint64_t head_parameters = 0;
};

inline FeatureSummary feature_summary(const ScatteringTree& tree, const std::vector<std::size_t>& fc_widths,
                                      std::size_t n_classes) {
  FeatureSummary s;
  for (int m = 0; m <= tree.max_depth(); ++m) {
    s.layer_paths.push_back(tree.layers()[static_cast<std::size_t>(m)].size());
    s.layer_coefficients.push_back(tree.output_samples(m));
    s.feature_dim += s.layer_coefficients.back();
  }
  s.head_parameters = dense_head_parameters(s.feature_dim, fc_widths, n_classes);
  return s;
}

/// Closed-form path count of layer m.
inline std::uint64_t path_count(int J, int L, int m, PathPolicy policy) {
  if (m < 0) return 0;
  if (policy == PathPolicy::full) {
    std::uint64_t n = 1;
    for (int i = 0; i < m; ++i) n *= static_cast<std::uint64_t>(J) * static_cast<std::uint64_t>(L);
    return n;
  }
  if (m > J) return 0;
  // C(J, m) increasing scale sequences times L^m rotations.
  std::uint64_t c = 1;
  for (int i = 1; i <= m; ++i) c = c * static_cast<std::uint64_t>(J - m + i) / static_cast<std::uint64_t>(i);
  for (int i = 0; i < m; ++i) c *= static_cast<std::uint64_t>(L);
  return c;
}

/// How the spatial size of each layer's output is derived from the input
/// side length, for the parameter-count search.
enum class OutputRule {
  full_resolution,   // plain, no decimation
  decimated,         // plain, every 2^J-th sample
  naive_truncate,    // decimated, then 3x3/3 max-pool dropping remainders
  naive_ceil,        // decimated, then 3x3/3 max-pool with partial blocks kept
  pooled,            // maxp: side / 2^m
  pooled_decimated,  // maxp: side / 2^m / 2^J
};

inline const char* to_string(OutputRule r) {
  switch (r) {
    case OutputRule::full_resolution: return "full_resolution";
    case OutputRule::decimated: return "decimated";
    case OutputRule::naive_truncate: return "naive_truncate";
    case OutputRule::naive_ceil: return "naive_ceil";
    case OutputRule::pooled: return "pooled";
    case OutputRule::pooled_decimated: return "pooled_decimated";
  }
  return "?";
}

/// Output side length of layer m, or 0 if the rule does not apply exactly.
inline std::size_t output_side(std::size_t input, int J, int m, OutputRule rule) {
  const std::size_t dec = std::size_t{1} << J;
  const std::size_t pooled = std::size_t{1} << m;
  switch (rule) {
    case OutputRule::full_resolution: return input;
    case OutputRule::decimated: return input % dec ? 0 : input / dec;
    case OutputRule::naive_truncate: return input % dec ? 0 : input / dec / 3;
    case OutputRule::naive_ceil: return input % dec ? 0 : (input / dec + 2) / 3;
    case OutputRule::pooled: return input % pooled ? 0 : input / pooled;
    case OutputRule::pooled_decimated: return input % (pooled * dec) ? 0 : input / pooled / dec;
  }
  return 0;
}

struct LayoutCandidate {
  int J = 3;
  int L = 8;
  PathPolicy policy = PathPolicy::frequency_decreasing;
  std::size_t input_side = 224;
  std::size_t channels = 1;
  int depth = 2;
  OutputRule rule = OutputRule::decimated;
};

/// Flattened feature dimension of a square-input layout, 0 if inapplicable.
inline std::uint64_t predicted_feature_dim(const LayoutCandidate& c) {
  std::uint64_t total = 0;
  for (int m = 0; m <= c.depth; ++m) {
    const std::size_t side = output_side(c.input_side, c.J, m, c.rule);
    if (side == 0) return 0;
    total += path_count(c.J, c.L, m, c.policy) * side * side;
  }
  return total * c.channels;
}

struct ReportedModel {
  std::string name;
  std::uint64_t parameters;
  std::size_t classes;
};

/// Parameter counts of the scattering models in the published
/// classification tables (Caltech-101: 102 classes, Caltech-256: 257).
inline std::vector<ReportedModel> reported_scattering_models() {
  return {{"caltech101/plain", 87592038, 102},  {"caltech101/naivep", 11596902, 102},
          {"caltech101/maxp", 9944166, 102},    {"caltech256/plain", 87631873, 257},
          {"caltech256/naivep", 11636737, 257}, {"caltech256/maxp", 9984001, 257}};
}

/// Feature dimension implied by a reported parameter count under the
/// default head, or 0 if no integer dimension fits.
inline std::uint64_t implied_feature_dim(std::uint64_t parameters, const std::vector<std::size_t>& widths,
                                         std::uint64_t classes) {
  const std::uint64_t rest = dense_head_parameters(0, widths, classes) - widths.front();
  if (parameters < rest + widths.front()) return 0;
  const std::uint64_t first = parameters - rest - widths.front();
  if (first % widths.front()) return 0;
  return first / widths.front();
}

struct LayoutMatch {
  std::string model;
  LayoutCandidate layout;
  std::uint64_t feature_dim;
};

/// Exhaustive search over conventional layouts for each reported count.
inline std::vector<LayoutMatch> search_reported_layouts(const std::vector<std::size_t>& widths = kDefaultHeadWidths) {
  std::vector<LayoutMatch> out;
  const std::vector<std::size_t> sides{32, 64, 96, 112, 128, 224, 256};
  const std::vector<int> orientations{2, 4, 6, 8, 12, 16};
  const std::vector<OutputRule> rules{OutputRule::full_resolution, OutputRule::decimated, OutputRule::naive_truncate,
                                      OutputRule::naive_ceil,      OutputRule::pooled,    OutputRule::pooled_decimated};
  for (const ReportedModel& model : reported_scattering_models()) {
    const std::uint64_t target = implied_feature_dim(model.parameters, widths, model.classes);
    if (target == 0) continue;
    for (int J = 1; J <= 5; ++J)
      for (int L : orientations)
        for (PathPolicy policy : {PathPolicy::full, PathPolicy::frequency_decreasing})
          for (std::size_t side : sides)
            for (std::size_t channels : {std::size_t{1}, std::size_t{3}})
              for (OutputRule rule : rules) {
                LayoutCandidate c{J, L, policy, side, channels, 2, rule};
                if (predicted_feature_dim(c) == target) out.push_back({model.name, c, target});
              }
  }
  return out;
}

/// Non-increasing per-layer side lengths (s_0 >= s_1 >= ...) with
/// sum_m paths[m] * s_m^2 == target. Used to describe counts that no
/// conventional layout reproduces.
inline std::vector<std::vector<std::size_t>> square_side_decompositions(std::uint64_t target,
                                                                        const std::vector<std::uint64_t>& paths,
                                                                        std::size_t max_side) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> sides(paths.size());
  auto rec = [&](auto&& self, std::size_t m, std::uint64_t remaining, std::size_t cap) -> void {
    if (m == paths.size()) {
      if (remaining == 0) out.push_back(sides);
      return;
    }
    for (std::size_t s = 1; s <= cap; ++s) {
      const std::uint64_t cost = paths[m] * s * s;
      if (cost > remaining) break;
      sides[m] = s;
      self(self, m + 1, remaining - cost, s);
    }
  };
  rec(rec, 0, target, max_side);
  return out;
}

}  // namespace scatmaxp
