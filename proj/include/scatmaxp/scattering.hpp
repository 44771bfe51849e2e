#pragma once

#include <compare>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/filterbank.hpp"
#include "scatmaxp/grid.hpp"
#include "scatmaxp/parallel.hpp"
#include "scatmaxp/pooling.hpp"

namespace scatmaxp {

/// Ordered sequence of wavelet indices; the empty path is the root.
struct Path {
  std::vector<FilterIndex> steps;

  std::size_t length() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }

  Path extended(FilterIndex idx) const {
    Path p = *this;
    p.steps.push_back(idx);
    return p;
  }

  /// "empty", or steps like "j0r3_j1r0".
  std::string label() const {
    if (steps.empty()) return "empty";
    std::string s;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i) s += '_';
      s += 'j' + std::to_string(steps[i].j) + 'r' + std::to_string(steps[i].r);
    }
    return s;
  }

  static Path parse(std::string_view text) {
    Path p;
    if (text == "empty") return p;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('_', pos);
      if (end == std::string_view::npos) end = text.size();
      const std::string tok(text.substr(pos, end - pos));
      FilterIndex idx;
      char tail = 0;
      if (std::sscanf(tok.c_str(), "j%dr%d%c", &idx.j, &idx.r, &tail) != 2)
        throw Error("malformed path step '" + tok + "'");
      p.steps.push_back(idx);
      pos = end + 1;
    }
    return p;
  }

  friend auto operator<=>(const Path&, const Path&) = default;
  friend bool operator==(const Path&, const Path&) = default;
};

enum class PathPolicy { full, frequency_decreasing };
enum class Mode { plain, maxp, naivep };
enum class ConvolutionEngine { spectral, direct };

inline const char* to_string(PathPolicy p) {
  return p == PathPolicy::full ? "full" : "frequency_decreasing";
}
inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::plain: return "plain";
    case Mode::maxp: return "maxp";
    case Mode::naivep: return "naivep";
  }
  return "?";
}
inline const char* to_string(ConvolutionEngine e) {
  return e == ConvolutionEngine::spectral ? "spectral" : "direct";
}

/// Whether `next` may follow `parent` under the policy. frequency_decreasing
/// keeps paths whose scale index strictly increases (coarser each step).
inline bool admits(PathPolicy policy, const Path& parent, FilterIndex next) {
  if (policy == PathPolicy::full || parent.empty()) return true;
  return next.j > parent.steps.back().j;
}

inline std::vector<Path> enumerate_paths(const FilterBank& bank, int m, PathPolicy policy) {
  if (m < 0) throw Error("path length must be non-negative");
  std::vector<Path> layer{Path{}};
  for (int depth = 0; depth < m; ++depth) {
    std::vector<Path> next;
    for (const Path& p : layer)
      for (const FilterIndex& idx : bank.indices())
        if (admits(policy, p, idx)) next.push_back(p.extended(idx));
    layer = std::move(next);
  }
  return layer;
}

inline SignalGrid convolve_with(const SignalGrid& f, const Spectrum& kernel_hat, ConvolutionEngine engine) {
  return engine == ConvolutionEngine::spectral ? convolve(f, kernel_hat) : convolve_direct(f, kernel_hat);
}

namespace detail {

inline void require_realized(const FilterSet& set, const SignalGrid& f, const char* what) {
  if (!set.grid.matches(f.plate()))
    throw Error(std::string("no ") + what + " realized for " + f.plate().describe());
}

}  // namespace detail

/// U[lambda] f = |psi_lambda * f| with filters already realized on f's grid.
inline SignalGrid propagate_one(const SignalGrid& f, std::size_t filter, const FilterSet& set,
                                ConvolutionEngine engine = ConvolutionEngine::spectral) {
  detail::require_realized(set, f, "wavelet");
  if (filter >= set.psi.size()) throw Error("filter slot out of range");
  return modulus(convolve_with(f, set.psi[filter], engine));
}

inline SignalGrid propagate_one(const SignalGrid& f, FilterIndex idx, const FilterBank& bank,
                                ConvolutionEngine engine = ConvolutionEngine::spectral) {
  const std::size_t slot = bank.index_of(idx);
  if (bank.base().grid.matches(f.plate())) return propagate_one(f, slot, bank.base(), engine);
  return propagate_one(f, slot, bank.realize(GridGeometry::of(f.plate())), engine);
}

struct PoolingConfig {
  std::size_t window = 2;  // samples per block and axis
  double factor = 2.0;     // S
  Admissibility admissibility = Admissibility::warn;
};

/// P(U[lambda] f). `depth` is the layer being produced; it only labels errors.
inline PoolOutcome propagate_pooled_checked(const SignalGrid& f, std::size_t filter, const FilterSet& set,
                                            const PoolingConfig& cfg, int depth = 1,
                                            ConvolutionEngine engine = ConvolutionEngine::spectral) {
  const SignalGrid u = propagate_one(f, filter, set, engine);
  PlatePartition part = [&] {
    try {
      return partition_by_window(u.plate(), cfg.window);
    } catch (const Error& e) {
      throw Error("pooling at depth " + std::to_string(depth) + ": " + e.what());
    }
  }();
  try {
    return max_pool_checked(u, part, cfg.factor, cfg.admissibility);
  } catch (const AdmissibilityError& e) {
    throw AdmissibilityError("pooling at depth " + std::to_string(depth) + ": " + e.what(), e.threshold(),
                             e.factor());
  }
}

inline SignalGrid propagate_pooled(const SignalGrid& f, FilterIndex idx, const FilterBank& bank,
                                   const PoolingConfig& cfg, int depth = 1) {
  const std::size_t slot = bank.index_of(idx);
  if (bank.base().grid.matches(f.plate())) return propagate_pooled_checked(f, slot, bank.base(), cfg, depth).signal;
  return propagate_pooled_checked(f, slot, bank.realize(GridGeometry::of(f.plate())), cfg, depth).signal;
}

/// Low-pass windowing phi_{2^J} * f.
inline SignalGrid window(const SignalGrid& f, const FilterSet& set,
                         ConvolutionEngine engine = ConvolutionEngine::spectral) {
  detail::require_realized(set, f, "low-pass");
  return convolve_with(f, set.phi, engine);
}

inline SignalGrid window(const SignalGrid& f, const FilterBank& bank,
                         ConvolutionEngine engine = ConvolutionEngine::spectral) {
  if (f.plate().dim() != bank.dim())
    throw Error("no low-pass available for " + f.plate().describe() + " from a " + std::to_string(bank.dim()) +
                "D bank");
  if (bank.base().grid.matches(f.plate())) return window(f, bank.base(), engine);
  return window(f, bank.realize(GridGeometry::of(f.plate())), engine);
}

struct TreeOptions {
  Mode mode = Mode::plain;
  int max_depth = 2;
  PathPolicy policy = PathPolicy::full;
  PoolingConfig pooling;
  bool decimate_outputs = false;  // plain/naivep: keep every 2^J-th output sample
  std::size_t naive_window = 3;
  ConvolutionEngine engine = ConvolutionEngine::spectral;
  unsigned threads = 0;  // 0: default_thread_count()
};

struct TreeNode {
  Path path;
  SignalGrid propagated;  // U[p]f, or the pooled propagator in maxp mode
  SignalGrid output;      // windowed coefficients
  double pool_threshold = 0.0;
  bool admissible = true;
};

/// Every propagated signal and windowed output, grouped by layer. Within a
/// layer nodes are ordered by parent, then by filter index.
class ScatteringTree {
 public:
  ScatteringTree(FilterBank bank, TreeOptions options, std::vector<std::vector<TreeNode>> layers)
      : bank_(std::move(bank)), options_(options), layers_(std::move(layers)) {
    for (std::size_t m = 0; m < layers_.size(); ++m)
      for (std::size_t i = 0; i < layers_[m].size(); ++i) lookup_[layers_[m][i].path] = {m, i};
  }

  Mode mode() const noexcept { return options_.mode; }
  const TreeOptions& options() const noexcept { return options_; }
  const FilterBank& bank() const noexcept { return bank_; }
  int max_depth() const noexcept { return static_cast<int>(layers_.size()) - 1; }
  const std::vector<std::vector<TreeNode>>& layers() const noexcept { return layers_; }

  std::size_t node_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.size();
    return n;
  }

  bool contains(const Path& p) const { return lookup_.count(p) != 0; }
  const TreeNode& node(const Path& p) const {
    auto it = lookup_.find(p);
    if (it == lookup_.end()) throw Error("path " + p.label() + " is not in the tree");
    return layers_[it->second.first][it->second.second];
  }

  /// Sum of ||propagated||^2 over layer m.
  double layer_energy(int m) const {
    double e = 0.0;
    for (const TreeNode& n : layers_.at(static_cast<std::size_t>(m))) e += l2_norm_squared(n.propagated);
    return e;
  }

  std::size_t inadmissible_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_)
      for (const TreeNode& node : l) n += node.admissible ? 0 : 1;
    return n;
  }

  /// Samples of propagated signals in layer m.
  std::size_t propagated_samples(int m) const {
    std::size_t n = 0;
    for (const TreeNode& node : layers_.at(static_cast<std::size_t>(m))) n += node.propagated.size();
    return n;
  }

  std::size_t output_samples(int m) const {
    std::size_t n = 0;
    for (const TreeNode& node : layers_.at(static_cast<std::size_t>(m))) n += node.output.size();
    return n;
  }

 private:
  FilterBank bank_;
  TreeOptions options_;
  std::vector<std::vector<TreeNode>> layers_;
  std::map<Path, std::pair<std::size_t, std::size_t>> lookup_;
};

namespace detail {

// Plate of a maxp node at depth m, or an error naming the first depth at
// which the pooling window no longer divides the grid.
inline std::vector<GridGeometry> pooled_geometries(const Plate& input, const PoolingConfig& cfg, int max_depth) {
  std::vector<GridGeometry> out{GridGeometry::of(input)};
  GridGeometry g = out.front();
  for (int m = 1; m <= max_depth; ++m) {
    for (int i = 0; i < g.dim; ++i) {
      if (cfg.window == 0 || g.shape[i] % cfg.window != 0)
        throw Error("pooling at depth " + std::to_string(m) + ": axis " + std::to_string(i) + " has " +
                    std::to_string(g.shape[i]) + " samples, not divisible by pooling window " +
                    std::to_string(cfg.window));
      g.shape[i] /= cfg.window;
      g.spacing[i] *= static_cast<double>(cfg.window) / cfg.factor;
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace detail

inline ScatteringTree compute_tree(const SignalGrid& f, const FilterBank& bank, const TreeOptions& opt) {
  if (opt.max_depth < 0) throw Error("max_depth must be non-negative");
  if (!bank.base().grid.matches(f.plate()))
    throw Error("input " + f.plate().describe() + " does not match the filter bank grid");

  std::vector<FilterSet> sets;
  if (opt.mode == Mode::maxp) {
    for (const GridGeometry& g : detail::pooled_geometries(f.plate(), opt.pooling, opt.max_depth))
      sets.push_back(bank.realize(g));
  } else {
    sets.push_back(bank.base());
  }
  const std::size_t decimation = std::size_t{1} << bank.J();

  auto finish_output = [&](const SignalGrid& u, const FilterSet& set) {
    SignalGrid s = window(u, set, opt.engine);
    if (opt.mode == Mode::maxp) return s;
    if (opt.decimate_outputs) s = subsample(s, decimation);
    if (opt.mode == Mode::naivep) s = max_pool_truncating(s, opt.naive_window);
    return s;
  };

  std::vector<std::vector<TreeNode>> layers;
  layers.push_back({TreeNode{Path{}, f, finish_output(f, sets.front())}});

  for (int m = 1; m <= opt.max_depth; ++m) {
    const std::vector<TreeNode>& parents = layers.back();
    struct Job {
      std::size_t parent;
      std::size_t filter;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < parents.size(); ++p)
      for (std::size_t k = 0; k < bank.indices().size(); ++k)
        if (admits(opt.policy, parents[p].path, bank.indices()[k])) jobs.push_back({p, k});

    const FilterSet& in_set = opt.mode == Mode::maxp ? sets[static_cast<std::size_t>(m - 1)] : sets.front();
    const FilterSet& out_set = opt.mode == Mode::maxp ? sets[static_cast<std::size_t>(m)] : sets.front();
    std::vector<std::optional<TreeNode>> slots(jobs.size());
    parallel_for(jobs.size(), opt.threads, [&](std::size_t i) {
      const Job& job = jobs[i];
      const TreeNode& parent = parents[job.parent];
      Path path = parent.path.extended(bank.indices()[job.filter]);
      if (opt.mode == Mode::maxp) {
        PoolOutcome pooled = propagate_pooled_checked(parent.propagated, job.filter, in_set, opt.pooling, m, opt.engine);
        SignalGrid out = finish_output(pooled.signal, out_set);
        slots[i].emplace(TreeNode{std::move(path), std::move(pooled.signal), std::move(out), pooled.threshold,
                                  pooled.admissible});
      } else {
        SignalGrid u = propagate_one(parent.propagated, job.filter, in_set, opt.engine);
        SignalGrid out = finish_output(u, out_set);
        slots[i].emplace(TreeNode{std::move(path), std::move(u), std::move(out)});
      }
    });
    std::vector<TreeNode> layer;
    layer.reserve(slots.size());
    for (auto& s : slots) layer.push_back(std::move(*s));
    layers.push_back(std::move(layer));
  }
  return ScatteringTree(bank, opt, std::move(layers));
}

}  // namespace scatmaxp
