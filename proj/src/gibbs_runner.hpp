#pragma once

#include "sae/dataset.hpp"
#include "sae/rng.hpp"

namespace sae::detail {

// Shared chain loop: each chain gets its own stream keyed by chain index,
// runs burn-in plus thinned sampling, and records its share of the retained
// draws.  Retained draws are split across chains as evenly as possible.
template <class Make, class Step, class Record>
void run_gibbs(const McmcConfig& mcmc, Make make, Step step, Record record) {
  int kept = 0;
  for (int chain = 0; chain < mcmc.chains; ++chain) {
    const int take =
        mcmc.iterations / mcmc.chains + (chain < mcmc.iterations % mcmc.chains ? 1 : 0);
    if (take == 0) continue;
    auto sampler = make(chain);
    RngStream rng(mcmc.seed, static_cast<std::uint64_t>(chain));
    for (int b = 0; b < mcmc.burn_in; ++b) step(sampler, rng);
    for (int t = 0; t < take; ++t) {
      for (int k = 0; k < mcmc.thin; ++k) step(sampler, rng);
      record(sampler, kept++);
    }
  }
}

}  // namespace sae::detail
