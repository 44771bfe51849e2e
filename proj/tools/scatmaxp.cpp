#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scatmaxp/config.hpp"
#include "scatmaxp/scatmaxp.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace scatmaxp;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct Overrides {
  std::string config_path;
  std::string mode, policy, out, input, format, suites;
  int depth = 0, J = 0, L = 0;
  std::uint64_t seed = 0;
  bool strict_pooling = false;
  std::vector<std::string> sets;
  CLI::Option *depth_opt = nullptr, *seed_opt = nullptr, *J_opt = nullptr, *L_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key=value config file");
  cmd->add_option("--mode", o.mode, "plain, maxp or naivep");
  o.depth_opt = cmd->add_option("--depth", o.depth, "maximum path length");
  o.seed_opt = cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--policy", o.policy, "full or frequency_decreasing");
  cmd->add_flag("--strict-pooling", o.strict_pooling, "error when a pooling factor is not admissible");
  o.J_opt = cmd->add_option("-J", o.J, "number of scales");
  o.L_opt = cmd->add_option("-L", o.L, "number of orientations");
  cmd->add_option("--input", o.input, "input image (PGM or SGRID)");
  cmd->add_option("--format", o.format, "sgrid or csv");
  cmd->add_option("--suites", o.suites, "comma-separated verify suites, or all");
  cmd->add_option("--set", o.sets, "override any config key: key=value")->take_all();
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.mode.empty()) cfg.set("mode", o.mode);
  if (!o.policy.empty()) cfg.set("policy", o.policy);
  if (!o.out.empty()) cfg.set("out", o.out);
  if (!o.input.empty()) cfg.set("input", o.input);
  if (!o.format.empty()) cfg.set("format", o.format);
  if (!o.suites.empty()) cfg.set("suites", o.suites);
  if (o.depth_opt->count()) cfg.depth = o.depth;
  if (o.seed_opt->count()) cfg.seed = o.seed;
  if (o.J_opt->count()) cfg.J = o.J;
  if (o.L_opt->count()) cfg.L = o.L;
  if (o.strict_pooling) cfg.admissibility = Admissibility::strict;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cfg.depth < 0) throw UsageError("depth must be nonnegative");
  return cfg;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

json plate_json(const Plate& p) {
  json j;
  j["dim"] = p.dim();
  j["origin"] = json::array();
  j["side_lengths"] = json::array();
  j["samples"] = json::array();
  for (int i = 0; i < p.dim(); ++i) {
    j["origin"].push_back(p.origin()[i]);
    j["side_lengths"].push_back(p.side_lengths()[i]);
    j["samples"].push_back(p.extent(i));
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) { io::detail::write_file(path, text); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Frequency response stored as an SGRID on a dimensionless bin grid
/// (bin k at index k, DFT order).
SignalGrid spectrum_as_grid(const Spectrum& s) {
  const Vec sides{static_cast<double>(s.shape[0]), static_cast<double>(s.shape[1])};
  return SignalGrid(Plate(s.dim, {0.0, 0.0}, sides, s.shape), s.data);
}

int cmd_filterbank(const RunConfig& cfg) {
  const Plate plate = cfg.input.empty() ? Plate::unit_square(cfg.size, cfg.size) : io::read_signal(cfg.input).plate();
  const FilterBank bank = cfg.make_bank(GridGeometry::of(plate));
  const FrameBounds lp = littlewood_paley_bounds(bank.base());
  const fs::path dir = cfg.out;
  ensure_dir(dir);

  json files = json::array();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const FilterIndex idx = bank.indices()[i];
    const std::string name = "psi_j" + std::to_string(idx.j) + "_r" + std::to_string(idx.r) + ".sgrid";
    io::write_sgrid(dir / name, spectrum_as_grid(bank.base().psi[i]));
    files.push_back({{"file", name}, {"kind", "wavelet"}, {"j", idx.j}, {"r", idx.r}});
  }
  io::write_sgrid(dir / "phi.sgrid", spectrum_as_grid(bank.base().phi));
  files.push_back({{"file", "phi.sgrid"}, {"kind", "lowpass"}, {"J", bank.J()}});

  json m;
  m["command"] = "filterbank";
  m["config"] = config_json(cfg);
  m["J"] = bank.J();
  m["L"] = bank.L();
  m["bank"] = to_string(bank.kind());
  m["params"] = {{"sigma0", bank.params().sigma0},
                 {"xi0", bank.params().xi0},
                 {"slant", bank.params().resolved_slant(bank.L())}};
  m["grid"] = plate_json(plate);
  m["domain"] = "frequency response, DFT bin order";
  m["frame_defect"] = lp.defect;
  m["lp_lower"] = lp.lower;
  m["lp_upper"] = lp.upper;
  m["B"] = theorem_constant_B(bank);
  m["files"] = files;
  write_text(dir / "manifest.json", m.dump(2) + '\n');
  std::printf("wrote %zu wavelets + 1 low-pass to %s\nframe_defect = %s\nB = %s\n", bank.size(), dir.c_str(),
              io::format_number(lp.defect).c_str(), io::format_number(theorem_constant_B(bank)).c_str());
  return kExitPass;
}

json summary_json(const FeatureSummary& s, std::size_t classes) {
  return {{"layer_paths", s.layer_paths},
          {"layer_coefficients", s.layer_coefficients},
          {"feature_dim", s.feature_dim},
          {"head_widths", kDefaultHeadWidths},
          {"classes", classes},
          {"head_parameters", s.head_parameters}};
}

int cmd_scatter(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("scatter needs an input image (--input or input=...)");
  const SignalGrid f = io::read_signal(cfg.input);
  const FilterBank bank = cfg.make_bank(GridGeometry::of(f.plate()));
  const ScatteringTree tree = compute_tree(f, bank, cfg.tree_options());
  const fs::path dir = cfg.out;
  ensure_dir(dir);

  json paths = json::array();
  std::string csv;
  if (cfg.format == OutputFormat::csv) csv = "path,sample,value\n";
  std::size_t id = 0;
  if (cfg.format == OutputFormat::sgrid) ensure_dir(dir / "coefficients");
  for (const auto& layer : tree.layers()) {
    for (const TreeNode& node : layer) {
      json steps = json::array();
      for (const FilterIndex& s : node.path.steps) steps.push_back({s.j, s.r});
      json entry = {{"id", id},
                    {"label", node.path.label()},
                    {"layer", node.path.length()},
                    {"steps", steps},
                    {"plate", plate_json(node.output.plate())},
                    {"propagated_plate", plate_json(node.propagated.plate())}};
      if (cfg.mode == Mode::maxp && node.path.length() > 0) {
        entry["pool_threshold"] = node.pool_threshold;
        entry["admissible"] = node.admissible;
      }
      if (cfg.format == OutputFormat::sgrid) {
        const std::string file = "coefficients/" + node.path.label() + ".sgrid";
        io::write_sgrid(dir / file, node.output);
        entry["file"] = file;
      } else {
        const auto v = node.output.values();
        for (std::size_t k = 0; k < v.size(); ++k)
          csv += std::to_string(id) + ',' + std::to_string(k) + ',' + io::format_number(v[k].real()) + '\n';
      }
      paths.push_back(entry);
      ++id;
    }
  }
  if (cfg.format == OutputFormat::csv) write_text(dir / "coefficients.csv", csv);

  const FeatureSummary summary = feature_summary(tree, kDefaultHeadWidths, cfg.classes);
  json m;
  m["command"] = "scatter";
  m["config"] = config_json(cfg);
  m["mode"] = to_string(cfg.mode);
  m["input_plate"] = plate_json(f.plate());
  m["inadmissible_pools"] = tree.inadmissible_count();
  m["paths"] = paths;
  m["feature_summary"] = summary_json(summary, cfg.classes);
  write_text(dir / "manifest.json", m.dump(2) + '\n');
  write_text(dir / "feature_summary.json", summary_json(summary, cfg.classes).dump(2) + '\n');

  std::printf("%s: %zu coefficient maps, F = %llu, dense head parameters = %llu\n", to_string(cfg.mode),
              tree.node_count(), static_cast<unsigned long long>(summary.feature_dim),
              static_cast<unsigned long long>(summary.head_parameters));
  for (std::size_t m_ = 0; m_ < summary.layer_paths.size(); ++m_)
    std::printf("  layer %zu: %zu paths, %zu coefficients\n", m_, summary.layer_paths[m_],
                summary.layer_coefficients[m_]);
  if (tree.inadmissible_count() > 0)
    std::fprintf(stderr, "warning: %zu pooling steps used a factor below the admissibility threshold\n",
                 tree.inadmissible_count());
  return kExitPass;
}

std::vector<std::string> split_suites(const std::string& spec) {
  static const std::vector<std::string> all{"contraction", "commutation",  "frame",      "energy",
                                            "energy_exact", "decay",       "equivariance"};
  if (spec == "all") return all;
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string s;
  while (std::getline(ss, s, ',')) {
    s = detail::trim(s);
    if (s.empty()) continue;
    if (std::find(all.begin(), all.end(), s) == all.end())
      throw UsageError("unknown suite '" + s + "' (expected all or a list of contraction, commutation, frame, energy, "
                       "energy_exact, decay, equivariance)");
    out.push_back(s);
  }
  if (out.empty()) throw UsageError("no verify suites selected");
  return out;
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<std::string> suites = split_suites(cfg.suites);
  const verify::SuiteConfig sc = cfg.suite_config();
  const fs::path dir = cfg.out;
  ensure_dir(dir);
  write_text(dir / "config.txt", cfg.to_text());

  bool failed = false, inconclusive = false;
  std::string summary;
  for (const std::string& name : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    verify::VerificationReport r;
    if (name == "contraction") r = verify::check_contraction(cfg.contraction_trials, sc);
    else if (name == "commutation") r = verify::check_commutation(cfg.commutation_trials, sc);
    else if (name == "frame") r = verify::check_frame(sc);
    else if (name == "energy") r = verify::run_energy_suite(sc, cfg.energy_inputs);
    else if (name == "energy_exact") r = verify::run_energy_suite(sc, cfg.energy_inputs, true);
    else if (name == "decay") r = verify::run_decay_suite(sc, cfg.decay_inputs);
    else r = verify::check_shift_equivariance_plain(cfg.equivariance_trials, sc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_text(dir / (name + ".csv"), r.to_csv());
    if (name == "decay") write_text(dir / "decay_table.csv", verify::decay_csv(verify::decay_table(r)));
    const std::string text = r.summary();
    std::printf("%s  runtime %.2f s\n", text.c_str(), secs);
    summary += text;
    failed |= r.verdict() == verify::Verdict::fail;
    inconclusive |= r.verdict() == verify::Verdict::inconclusive;
  }
  write_text(dir / "summary.txt", summary);
  if (failed) return kExitFail;
  return inconclusive ? kExitInconclusive : kExitPass;
}

int cmd_bench(const RunConfig& cfg) {
  const Plate plate = verify::centered_plate(cfg.size);
  const FilterBank bank = cfg.make_bank(GridGeometry::of(plate));
  std::mt19937_64 rng(cfg.seed);
  std::vector<SignalGrid> batch;
  for (std::size_t i = 0; i < std::max<std::size_t>(cfg.batch, 1); ++i)
    batch.push_back(verify::random_signal(rng, plate, i % 2 ? verify::Family::sparse_spikes : verify::Family::uniform));

  json modes = json::object();
  std::size_t plain_total = 0, maxp_total = 0;
  for (Mode mode : {Mode::plain, Mode::maxp, Mode::naivep}) {
    TreeOptions opt = cfg.tree_options();
    opt.mode = mode;
    std::vector<std::size_t> per_layer;
    const auto t0 = std::chrono::steady_clock::now();
    for (const SignalGrid& f : batch) {
      const ScatteringTree tree = compute_tree(f, bank, opt);
      if (per_layer.empty())
        for (int m = 0; m <= tree.max_depth(); ++m) per_layer.push_back(tree.propagated_samples(m));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t total = 0;
    for (std::size_t n : per_layer) total += n;
    if (mode == Mode::plain) plain_total = total;
    if (mode == Mode::maxp) maxp_total = total;
    const double rate = static_cast<double>(batch.size()) / secs;
    modes[to_string(mode)] = {{"signals_per_second", rate}, {"propagated_samples", per_layer}, {"total", total}};
    std::printf("%-7s %10.2f signals/s  propagated samples per layer:", to_string(mode), rate);
    for (std::size_t n : per_layer) std::printf(" %zu", n);
    std::printf("  (total %zu)\n", total);
  }

  const bool ok = cfg.depth == 0 ? maxp_total == plain_total : maxp_total < plain_total;
  std::printf("maxp/plain sample ratio = %s (%s)\n",
              io::format_number(static_cast<double>(maxp_total) / static_cast<double>(plain_total)).c_str(),
              ok ? "ok" : "FAIL: maxp should process fewer samples");
  const fs::path dir = cfg.out;
  ensure_dir(dir);
  json m;
  m["command"] = "bench";
  m["config"] = config_json(cfg);
  m["batch"] = batch.size();
  m["modes"] = modes;
  m["maxp_fewer_samples"] = ok;
  write_text(dir / "bench.json", m.dump(2) + '\n');
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Windowed scattering with continuous max-pooling"};
  app.require_subcommand(1);
  Overrides fb, sc, vf, bn;
  CLI::App* filterbank = app.add_subcommand("filterbank", "export the filter bank and its frame diagnostics");
  CLI::App* scatter = app.add_subcommand("scatter", "compute scattering coefficients of an image");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the property verification suites");
  CLI::App* bench = app.add_subcommand("bench", "time the three cascade modes on synthetic inputs");
  add_common_flags(filterbank, fb);
  add_common_flags(scatter, sc);
  add_common_flags(verify_cmd, vf);
  add_common_flags(bench, bn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*filterbank) return cmd_filterbank(resolve(fb));
    if (*scatter) return cmd_scatter(resolve(sc));
    if (*verify_cmd) return cmd_verify(resolve(vf));
    return cmd_bench(resolve(bn));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
}
