#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/filterbank.hpp"
#include "scatmaxp/grid.hpp"
#include "scatmaxp/io.hpp"
#include "scatmaxp/pooling.hpp"
#include "scatmaxp/scattering.hpp"

namespace scatmaxp::verify {

enum class Status { pass, fail, skip };
enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skip: return "skip";
  }
  return "?";
}
inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// One checked inequality or identity. `measured` is compared against
/// `bound`; both are always stored.
struct CaseRecord {
  std::string label;
  std::string inputs;
  double measured = 0.0;
  double bound = 0.0;
  Status status = Status::pass;
};

/// Recorded quantity with no asserted bound.
struct Diagnostic {
  std::string label;
  double value = 0.0;
};

struct VerificationReport {
  std::string suite;
  std::vector<CaseRecord> cases;
  std::vector<std::pair<std::string, std::string>> environment;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> notes;

  std::size_t count(Status s) const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [s](const CaseRecord& c) {
      return c.status == s;
    }));
  }

  /// Fails on any failed case; inconclusive when nothing was evaluated.
  Verdict verdict() const {
    if (count(Status::fail) > 0) return Verdict::fail;
    if (count(Status::pass) == 0) return Verdict::inconclusive;
    return Verdict::pass;
  }

  void add(std::string label, std::string inputs, double measured, double bound, bool ok) {
    cases.push_back({std::move(label), std::move(inputs), measured, bound, ok ? Status::pass : Status::fail});
  }
  void skip(std::string label, std::string inputs, double measured = 0.0, double bound = 0.0) {
    cases.push_back({std::move(label), std::move(inputs), measured, bound, Status::skip});
  }
  void env(std::string key, std::string value) { environment.emplace_back(std::move(key), std::move(value)); }
  void env(std::string key, double value) { env(std::move(key), io::format_number(value)); }

  /// Appends another report's cases and diagnostics under a label prefix.
  void absorb(const VerificationReport& other, const std::string& prefix) {
    for (CaseRecord c : other.cases) {
      c.label = prefix + c.label;
      cases.push_back(std::move(c));
    }
    for (Diagnostic d : other.diagnostics) {
      d.label = prefix + d.label;
      diagnostics.push_back(std::move(d));
    }
  }

  std::string to_csv() const {
    std::string out = "suite,case,inputs,measured,bound,status\n";
    for (const CaseRecord& c : cases)
      out += suite + ',' + c.label + ',' + c.inputs + ',' + io::format_number(c.measured) + ',' +
             io::format_number(c.bound) + ',' + to_string(c.status) + '\n';
    return out;
  }

  std::string summary() const {
    std::ostringstream os;
    os << suite << ": " << to_string(verdict()) << " (" << count(Status::pass) << " passed, "
       << count(Status::fail) << " failed, " << count(Status::skip) << " skipped)\n";
    for (const auto& [k, v] : environment) os << "  " << k << " = " << v << '\n';
    for (const CaseRecord& c : cases)
      if (c.status == Status::fail)
        os << "  FAIL " << c.label << " [" << c.inputs << "] measured " << io::format_number(c.measured)
           << " > bound " << io::format_number(c.bound) << '\n';
    for (const Diagnostic& d : diagnostics) os << "  " << d.label << " = " << io::format_number(d.value) << '\n';
    for (const std::string& n : notes) os << "  note: " << n << '\n';
    return os.str();
  }
};

/// Knobs shared by every suite. Defaults are the desk-scale configuration.
struct SuiteConfig {
  std::uint64_t seed = 0;

  // Cascade suites (energy, decay).
  int J = 2;
  int L = 2;
  std::size_t grid = 64;
  int depth = 3;
  MorletParams morlet;
  PathPolicy policy = PathPolicy::full;

  // Pooling: blocks of `window` samples, S chosen from `factors`.
  std::size_t window = 2;
  std::vector<double> factors{2.0};
  Admissibility admissibility = Admissibility::warn;
  std::size_t pool_grid = 32;  // contraction / commutation signals

  // Frame suite.
  int frame_J = 3;
  int frame_L = 8;
  std::size_t frame_grid = 128;
  double frame_defect_limit = 0.2;
  double exact_defect_limit = 1e-12;

  // Equivariance suite (direct convolution, so kept small).
  std::size_t equivariance_grid = 32;
  int equivariance_depth = 2;

  // Slack constants.
  double identity_rel_tol = 1e-12;
  double decay_slack = 1.1;

  unsigned threads = 0;
};

/// Physical plate used by every suite: [-1/2, 1/2]^2, so 0 is inside.
inline Plate centered_plate(std::size_t n) { return Plate::rect({-0.5, -0.5}, {1.0, 1.0}, {n, n}); }

enum class Family { uniform, sparse_spikes };

inline const char* to_string(Family f) { return f == Family::uniform ? "uniform" : "sparse_spikes"; }

/// Deterministic uniform [0, 1) from 53 random bits.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Nonnegative random signal. `uniform`: i.i.d. U[0,1). `sparse_spikes`:
/// each sample is a spike of height U(0,1] with probability drawn from
/// [0.02, 0.5], otherwise zero; at least one spike is present.
inline SignalGrid random_signal(std::mt19937_64& rng, const Plate& plate, Family family) {
  std::vector<cplx> v(plate.sample_count());
  if (family == Family::uniform) {
    for (auto& x : v) x = unit_uniform(rng);
  } else {
    const double density = 0.02 + 0.48 * unit_uniform(rng);
    for (auto& x : v)
      if (unit_uniform(rng) < density) x = 1.0 - unit_uniform(rng);
    const std::size_t forced = static_cast<std::size_t>(rng() % v.size());
    if (v[forced] == cplx{}) v[forced] = 1.0 - unit_uniform(rng);
  }
  return SignalGrid(plate, std::move(v));
}

namespace detail {

inline std::string describe_shift(const Vec& c, int dim) {
  std::ostringstream os;
  os.precision(17);
  os << "c=(" << c[0];
  if (dim == 2) os << ' ' << c[1];
  os << ')';
  return os.str();
}

inline void bank_environment(VerificationReport& r, const FilterBank& bank, const SuiteConfig& cfg) {
  r.env("bank", to_string(bank.kind()));
  r.env("J", std::to_string(bank.J()));
  r.env("L", std::to_string(bank.L()));
  r.env("grid", std::to_string(bank.base().grid.shape[0]) + "x" + std::to_string(bank.base().grid.shape[1]));
  r.env("window", std::to_string(cfg.window));
  r.env("policy", to_string(cfg.policy));
}

}  // namespace detail

/// ||P f||_2 <= ||f||_2 for random nonnegative signals with an admissible S.
inline VerificationReport check_contraction(std::size_t trials, const SuiteConfig& cfg) {
  if (trials < 1) throw Error("check_contraction needs at least one trial");
  VerificationReport r;
  r.suite = "contraction";
  std::mt19937_64 rng(cfg.seed);
  const Plate plate = centered_plate(cfg.pool_grid);
  std::vector<double> factors = cfg.factors;
  std::sort(factors.begin(), factors.end());
  r.env("grid", std::to_string(cfg.pool_grid) + "x" + std::to_string(cfg.pool_grid));
  r.env("window", std::to_string(cfg.window));
  r.env("seed", std::to_string(cfg.seed));
  r.env("admissibility", to_string(cfg.admissibility));
  const PlatePartition part = partition_by_window(plate, cfg.window);
  for (std::size_t t = 0; t < trials; ++t) {
    const Family fam = t % 2 == 0 ? Family::uniform : Family::sparse_spikes;
    const SignalGrid f = random_signal(rng, plate, fam);
    const double threshold = min_admissible_factor(f);
    const std::string inputs = std::string(to_string(fam)) + " threshold=" + io::format_number(threshold);
    const auto it = std::find_if(factors.begin(), factors.end(), [&](double S) { return S > threshold; });
    if (it == factors.end()) {
      if (cfg.admissibility == Admissibility::strict)
        throw AdmissibilityError("check_contraction precondition violated: no pooling factor in the allowed set "
                                 "exceeds the admissibility threshold " + io::format_number(threshold) +
                                 " (trial " + std::to_string(t) + ")",
                                 threshold, factors.empty() ? 0.0 : factors.back());
      r.skip("trial" + std::to_string(t), inputs, threshold, factors.empty() ? 0.0 : factors.back());
      continue;
    }
    const SignalGrid pooled = max_pool(f, part, *it, Admissibility::off);
    const double lhs = l2_norm(pooled), rhs = l2_norm(f);
    r.add("trial" + std::to_string(t), inputs + " S=" + io::format_number(*it), lhs,
          rhs * (1.0 + cfg.identity_rel_tol), lhs <= rhs * (1.0 + cfg.identity_rel_tol));
  }
  if (r.count(Status::skip) > 0)
    r.notes.push_back(std::to_string(r.count(Status::skip)) + " trials had no admissible pooling factor");
  return r;
}

/// P(T_c f) == T_{c/S} P(f), values bit-exact and plates equal, for
/// block-aligned shifts keeping 0 inside the translated plate.
inline VerificationReport check_commutation(std::size_t trials, const SuiteConfig& cfg) {
  VerificationReport r;
  r.suite = "commutation";
  std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995u);
  const Plate plate = centered_plate(cfg.pool_grid);
  const double S = cfg.factors.empty() ? 2.0 : cfg.factors.front();
  const double block = static_cast<double>(cfg.window) * plate.spacing(0);
  // 0 stays in D + c iff |c_i| <= 1/2 on the centered unit plate.
  const long reach = static_cast<long>(cfg.pool_grid / (2 * cfg.window));
  r.env("grid", std::to_string(cfg.pool_grid) + "x" + std::to_string(cfg.pool_grid));
  r.env("window", std::to_string(cfg.window));
  r.env("S", S);
  r.env("seed", std::to_string(cfg.seed));
  r.notes.push_back("shifts are drawn block-aligned; non-aligned shifts are outside the identity's hypothesis");
  for (std::size_t t = 0; t < trials; ++t) {
    const Family fam = t % 2 == 0 ? Family::uniform : Family::sparse_spikes;
    const SignalGrid f = random_signal(rng, plate, fam);
    Vec c{0.0, 0.0};
    if (t > 0) {
      for (int i = 0; i < 2; ++i) {
        const long k = static_cast<long>(rng() % static_cast<std::uint64_t>(2 * reach + 1)) - reach;
        c[i] = static_cast<double>(k) * block;
      }
    }
    const SignalGrid shifted = translate_with_plate(f, c);
    const SignalGrid lhs = max_pool(shifted, partition_by_window(shifted.plate(), cfg.window), S, Admissibility::off);
    const SignalGrid pooled = max_pool(f, partition_by_window(plate, cfg.window), S, Admissibility::off);
    const SignalGrid rhs = translate_with_plate(pooled, {c[0] / S, c[1] / S});
    double diff = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) diff = std::max(diff, std::abs(lhs.values()[i] - rhs.values()[i]));
    const bool ok = lhs.same_values(rhs) && lhs.plate().approx_equal(rhs.plate(), cfg.identity_rel_tol);
    r.add("trial" + std::to_string(t), std::string(to_string(fam)) + ' ' + detail::describe_shift(c, 2), diff, 0.0,
          ok);
  }
  return r;
}

/// Littlewood-Paley defect of the default Morlet bank and of the
/// exact-partition fixture, plus zero-mean checks.
inline VerificationReport check_frame(const SuiteConfig& cfg) {
  VerificationReport r;
  r.suite = "frame";
  const GridGeometry g{2, {cfg.frame_grid, cfg.frame_grid}, {1.0, 1.0}};
  const FilterBank morlet = build_morlet_bank(cfg.frame_J, cfg.frame_L, g, cfg.morlet);
  const FilterBank exact = build_exact_partition_bank(cfg.frame_J, cfg.frame_L, g);
  const FrameBounds mb = littlewood_paley_bounds(morlet.base());
  const FrameBounds eb = littlewood_paley_bounds(exact.base());
  r.env("J", std::to_string(cfg.frame_J));
  r.env("L", std::to_string(cfg.frame_L));
  r.env("grid", std::to_string(cfg.frame_grid) + "x" + std::to_string(cfg.frame_grid));
  r.add("morlet_defect", "sigma0=" + io::format_number(cfg.morlet.sigma0) + " xi0=" + io::format_number(cfg.morlet.xi0),
        mb.defect, cfg.frame_defect_limit, mb.defect <= cfg.frame_defect_limit);
  r.add("exact_partition_defect", "indicator bands", eb.defect, cfg.exact_defect_limit,
        eb.defect <= cfg.exact_defect_limit);
  double worst_dc = 0.0;
  for (const Spectrum& psi : morlet.base().psi) worst_dc = std::max(worst_dc, std::abs(psi.data[0]));
  r.add("morlet_zero_mean", "max |psi_hat(0)|", worst_dc, 1e-12, worst_dc <= 1e-12);
  const double dc_floor = std::abs(1.0 - std::norm(morlet.base().phi.data[0]));
  r.add("defect_dominates_dc", "|1-|phi_hat(0)|^2|", dc_floor, mb.defect, dc_floor <= mb.defect);
  r.diagnostics.push_back({"morlet_lp_lower", mb.lower});
  r.diagnostics.push_back({"morlet_lp_upper", mb.upper});
  r.diagnostics.push_back({"morlet_B", theorem_constant_B(morlet)});
  return r;
}

/// E_m = sum over layer m of ||U~[p] f||^2 must satisfy
/// E_{m+1} <= (1+eps) E_m and E_m <= (1+eps)^m E_0, eps the measured frame
/// defect. With `strict`, additionally E_{m+1} < E_m whenever E_m > 0.
inline VerificationReport check_energy_monotonic(const SignalGrid& f, const FilterBank& bank, const SuiteConfig& cfg,
                                                 bool strict = false) {
  VerificationReport r;
  r.suite = "energy";
  TreeOptions opt;
  opt.mode = Mode::maxp;
  opt.max_depth = cfg.depth;
  opt.policy = cfg.policy;
  opt.pooling = {cfg.window, cfg.factors.empty() ? 2.0 : cfg.factors.front(), cfg.admissibility};
  opt.threads = cfg.threads;
  const ScatteringTree tree = compute_tree(f, bank, opt);

  // The bound at depth m uses the frame of the grid the layer lives on.
  double eps = frame_defect(bank);
  for (const GridGeometry& g : scatmaxp::detail::pooled_geometries(f.plate(), opt.pooling, cfg.depth))
    eps = std::max(eps, frame_defect(bank.realize(g)));
  detail::bank_environment(r, bank, cfg);
  r.env("eps_lp", eps);
  r.env("inadmissible_pools", std::to_string(tree.inadmissible_count()));

  std::vector<double> E;
  for (int m = 0; m <= cfg.depth; ++m) {
    E.push_back(tree.layer_energy(m));
    r.diagnostics.push_back({"E" + std::to_string(m), E.back()});
  }
  const double tol = 1.0 + cfg.identity_rel_tol;
  for (int m = 0; m < cfg.depth; ++m) {
    const double step_bound = (1.0 + eps) * E[m] * tol;
    r.add("step" + std::to_string(m + 1), "E" + std::to_string(m + 1) + "<=(1+eps)E" + std::to_string(m), E[m + 1],
          step_bound, E[m + 1] <= step_bound);
    if (strict && E[m] > 0.0)
      r.add("strict" + std::to_string(m + 1), "E" + std::to_string(m + 1) + "<E" + std::to_string(m), E[m + 1], E[m],
            E[m + 1] < E[m]);
  }
  for (int m = 1; m <= cfg.depth; ++m) {
    const double total_bound = std::pow(1.0 + eps, m) * E[0] * tol;
    r.add("total" + std::to_string(m), "E" + std::to_string(m) + "<=(1+eps)^m E0", E[m], total_bound,
          E[m] <= total_bound);
  }
  return r;
}

/// One row of the decay table.
struct DecayRow {
  std::string input;  // label prefix of the case, empty for a single input
  int m;
  double d;
  double bound;
};

inline std::vector<DecayRow> decay_table(const VerificationReport& r) {
  std::vector<DecayRow> rows;
  for (const CaseRecord& c : r.cases) {
    const std::size_t slash = c.label.rfind('/');
    const std::string input = slash == std::string::npos ? "" : c.label.substr(0, slash);
    const std::string leaf = slash == std::string::npos ? c.label : c.label.substr(slash + 1);
    if (leaf.rfind("bound", 0) == 0) rows.push_back({input, std::stoi(leaf.substr(5)), c.measured, c.bound});
  }
  return rows;
}

inline std::string decay_csv(const std::vector<DecayRow>& rows) {
  std::string out = "input,m,d_m,bound_m\n";
  for (const DecayRow& row : rows)
    out += row.input + ',' + std::to_string(row.m) + ',' + io::format_number(row.d) + ',' +
           io::format_number(row.bound) + '\n';
  return out;
}

/// d_m = sum_p ||S~[p] f - S~[p] T_c f||^2 against |c|^2 B^2 S^{-2m} ||f||^2
/// (with the configured slack), plus d_{m+1} <= d_m.
inline VerificationReport check_invariance_decay(const SignalGrid& f, const Vec& c, const FilterBank& bank,
                                                 const SuiteConfig& cfg) {
  VerificationReport r;
  r.suite = "decay";
  const Plate& plate = f.plate();
  const double S = cfg.factors.empty() ? 2.0 : cfg.factors.front();
  // The shift must stay aligned with the grid at every depth.
  for (int i = 0; i < plate.dim(); ++i) {
    const double unit = plate.spacing(i) * std::pow(static_cast<double>(cfg.window), cfg.depth);
    long k = 0;
    if (!scatmaxp::detail::near_integer(c[i] / unit, 1e-9, k))
      throw Error("shift " + io::format_number(c[i]) + " on axis " + std::to_string(i) +
                  " is not a multiple of window^depth samples (" + io::format_number(unit) + ")");
  }
  const SignalGrid moved = translate_with_plate(f, c);

  TreeOptions opt;
  opt.mode = Mode::maxp;
  opt.max_depth = cfg.depth;
  opt.policy = cfg.policy;
  opt.pooling = {cfg.window, S, cfg.admissibility};
  opt.threads = cfg.threads;
  const ScatteringTree a = compute_tree(f, bank, opt);
  const ScatteringTree b = compute_tree(moved, bank, opt);

  const double B = theorem_constant_B(bank);
  const double c2 = c[0] * c[0] + (plate.dim() == 2 ? c[1] * c[1] : 0.0);
  const double f2 = l2_norm_squared(f);
  detail::bank_environment(r, bank, cfg);
  r.env("B", B);
  r.env("S", S);
  r.env("shift", detail::describe_shift(c, plate.dim()));
  r.env("slack", cfg.decay_slack);
  r.notes.push_back("the multiplicative slack covers discretization of a continuum bound");

  double previous = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= cfg.depth; ++m) {
    double d = 0.0;
    const auto& la = a.layers()[static_cast<std::size_t>(m)];
    const auto& lb = b.layers()[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < la.size(); ++i) {
      const SignalGrid back = realign_periodic(lb[i].output, la[i].output.plate());
      d += l2_norm_squared(subtract(la[i].output, back));
    }
    const double bound = cfg.decay_slack * c2 * B * B * std::pow(S, -2.0 * m) * f2;
    r.add("bound" + std::to_string(m), "d" + std::to_string(m) + "<=slack|c|^2B^2S^-2m||f||^2", d, bound, d <= bound);
    if (m > 0)
      r.add("monotone" + std::to_string(m), "d" + std::to_string(m) + "<=d" + std::to_string(m - 1), d, previous,
            d <= previous);
    previous = d;
  }
  return r;
}

/// Bit-exact circular-shift equivariance of the plain cascade (direct
/// convolution engine), plus recorded diagnostics: the spectral engine's
/// deviation from exact equivariance and the normalized output change per J.
inline VerificationReport check_shift_equivariance_plain(std::size_t trials, const SuiteConfig& cfg) {
  VerificationReport r;
  r.suite = "equivariance";
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t n = cfg.equivariance_grid;
  const Plate plate = centered_plate(n);
  const FilterBank bank = build_morlet_bank(cfg.J, cfg.L, plate, cfg.morlet);
  TreeOptions opt;
  opt.mode = Mode::plain;
  opt.max_depth = cfg.equivariance_depth;
  opt.policy = cfg.policy;
  opt.engine = ConvolutionEngine::direct;
  opt.threads = cfg.threads;
  r.env("J", std::to_string(cfg.J));
  r.env("L", std::to_string(cfg.L));
  r.env("grid", std::to_string(n) + "x" + std::to_string(n));
  r.env("depth", std::to_string(cfg.equivariance_depth));
  r.env("engine", "direct");

  double spectral_dev = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Family fam = t % 2 == 0 ? Family::uniform : Family::sparse_spikes;
    const SignalGrid f = random_signal(rng, plate, fam);
    Offsets c{0, 0};
    if (t > 0)
      for (int i = 0; i < 2; ++i) c[i] = static_cast<long>(rng() % (2 * n - 1)) - static_cast<long>(n - 1);
    const ScatteringTree base = compute_tree(f, bank, opt);
    const ScatteringTree moved = compute_tree(translate_in_plate(f, c), bank, opt);
    std::size_t mismatched = 0;
    for (std::size_t m = 0; m < base.layers().size(); ++m) {
      for (std::size_t i = 0; i < base.layers()[m].size(); ++i) {
        const TreeNode& x = base.layers()[m][i];
        const TreeNode& y = moved.layers()[m][i];
        if (!translate_in_plate(x.propagated, c).same_values(y.propagated)) ++mismatched;
        if (!translate_in_plate(x.output, c).same_values(y.output)) ++mismatched;
      }
    }
    r.add("trial" + std::to_string(t),
          std::string(to_string(fam)) + " c=(" + std::to_string(c[0]) + ' ' + std::to_string(c[1]) + ")",
          static_cast<double>(mismatched), 0.0, mismatched == 0);

    if (t < 3) {
      TreeOptions fft_opt = opt;
      fft_opt.engine = ConvolutionEngine::spectral;
      const ScatteringTree sa = compute_tree(f, bank, fft_opt);
      const ScatteringTree sb = compute_tree(translate_in_plate(f, c), bank, fft_opt);
      for (std::size_t m = 0; m < sa.layers().size(); ++m)
        for (std::size_t i = 0; i < sa.layers()[m].size(); ++i) {
          const SignalGrid shifted = translate_in_plate(sa.layers()[m][i].output, c);
          const SignalGrid& other = sb.layers()[m][i].output;
          const double scale = std::max(linf_norm(other), std::numeric_limits<double>::min());
          for (std::size_t k = 0; k < other.size(); ++k)
            spectral_dev = std::max(spectral_dev, std::abs(shifted.values()[k] - other.values()[k]) / scale);
        }
    }
  }
  r.diagnostics.push_back({"spectral_engine_max_rel_deviation", spectral_dev});

  // Normalized output change under a fixed circular shift, per J.
  std::mt19937_64 drng(cfg.seed + 17);
  const SignalGrid probe = random_signal(drng, plate, Family::uniform);
  const Offsets c{static_cast<long>(n / 8), static_cast<long>(n / 16)};
  const SignalGrid probe_shifted = translate_in_plate(probe, c);
  const double f2 = l2_norm_squared(probe);
  TreeOptions diag = opt;
  diag.engine = ConvolutionEngine::spectral;
  for (int J = 1; (std::size_t{1} << J) <= n / 4; ++J) {
    const FilterBank bj = build_morlet_bank(J, cfg.L, plate, cfg.morlet);
    const ScatteringTree ta = compute_tree(probe, bj, diag);
    const ScatteringTree tb = compute_tree(probe_shifted, bj, diag);
    double total = 0.0;
    for (std::size_t m = 0; m < ta.layers().size(); ++m)
      for (std::size_t i = 0; i < ta.layers()[m].size(); ++i)
        total += l2_norm_squared(subtract(ta.layers()[m][i].output, tb.layers()[m][i].output));
    r.diagnostics.push_back({"shift_change_J" + std::to_string(J), total / f2});
  }
  return r;
}

/// check_energy_monotonic over `inputs` random images (both families).
inline VerificationReport run_energy_suite(const SuiteConfig& cfg, std::size_t inputs, bool exact_partition = false) {
  VerificationReport r;
  r.suite = exact_partition ? "energy_exact" : "energy";
  const Plate plate = centered_plate(cfg.grid);
  const FilterBank bank = exact_partition ? build_exact_partition_bank(cfg.J, cfg.L, plate)
                                          : build_morlet_bank(cfg.J, cfg.L, plate, cfg.morlet);
  std::mt19937_64 rng(cfg.seed + (exact_partition ? 7 : 3));
  for (std::size_t i = 0; i < inputs; ++i) {
    const Family fam = i % 2 == 0 ? Family::uniform : Family::sparse_spikes;
    const SignalGrid f = random_signal(rng, plate, fam);
    VerificationReport one = check_energy_monotonic(f, bank, cfg, exact_partition);
    if (i == 0) r.environment = one.environment;
    r.absorb(one, "input" + std::to_string(i) + "/");
  }
  return r;
}

/// One-block shift at the deepest level: c = window^depth samples per axis.
inline Vec default_decay_shift(const Plate& plate, const SuiteConfig& cfg) {
  const double k = std::pow(static_cast<double>(cfg.window), cfg.depth);
  return {k * plate.spacing(0), plate.dim() == 2 ? k * plate.spacing(1) : 0.0};
}

inline VerificationReport run_decay_suite(const SuiteConfig& cfg, std::size_t inputs) {
  VerificationReport r;
  r.suite = "decay";
  const Plate plate = centered_plate(cfg.grid);
  const FilterBank bank = build_morlet_bank(cfg.J, cfg.L, plate, cfg.morlet);
  const Vec c = default_decay_shift(plate, cfg);
  std::mt19937_64 rng(cfg.seed + 11);
  for (std::size_t i = 0; i < inputs; ++i) {
    const Family fam = i % 2 == 0 ? Family::uniform : Family::sparse_spikes;
    const SignalGrid f = random_signal(rng, plate, fam);
    VerificationReport one = check_invariance_decay(f, c, bank, cfg);
    if (i == 0) {
      r.environment = one.environment;
      r.notes = one.notes;
    }
    r.absorb(one, "input" + std::to_string(i) + "/");
  }
  return r;
}

}  // namespace scatmaxp::verify
