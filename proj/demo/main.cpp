// Small walk-through: build a bank, scatter a synthetic image with and
// without max pooling, and compare feature sizes and layer energies.

#include <cstdio>
#include <random>

#include "scatmaxp/scatmaxp.hpp"

using namespace scatmaxp;

int main() {
  const Plate plate = Plate::unit_square(64, 64);
  const FilterBank bank = build_morlet_bank(2, 4, plate);
  std::printf("bank: %zu wavelets, frame defect %.4f\n", bank.size(), frame_defect(bank));

  std::mt19937_64 rng(7);
  const SignalGrid f = verify::random_signal(rng, plate, verify::Family::uniform);

  for (Mode mode : {Mode::plain, Mode::maxp, Mode::naivep}) {
    TreeOptions opt;
    opt.mode = mode;
    opt.max_depth = 2;
    const ScatteringTree tree = compute_tree(f, bank, opt);
    const FeatureSummary fs = feature_summary(tree, kDefaultHeadWidths, 10);
    std::printf("%-7s features %8llu  head parameters %10llu  layer energies:", to_string(mode),
                static_cast<unsigned long long>(fs.feature_dim), static_cast<unsigned long long>(fs.head_parameters));
    for (int m = 0; m <= opt.max_depth; ++m) std::printf(" %.4g", tree.layer_energy(m));
    std::printf("\n");
  }
}
