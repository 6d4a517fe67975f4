#ifndef WGCHAIN_SAMPLING_HPP
#define WGCHAIN_SAMPLING_HPP

// Seeded disorder generation.
//
// Every realization owns independent random streams keyed by
// (master_seed, realization_index, stream id). A key is hashed with SplitMix64
// into the seed of a std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The distributions are implemented here rather than taken from
// <random> because std::uniform_int_distribution and std::normal_distribution
// are implementation-defined and would break cross-platform reproducibility.
//
//   uniform01: top 53 bits of one engine draw, in [0, 1)
//   below(n):  Lemire multiply-shift with rejection, unbiased
//   normal:    Box-Muller cosine branch, two uniforms per draw, no truncation

#include "wgchain/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace wgchain {

struct SampleSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

enum class Stream : std::uint64_t {
  Occupancy = 1,
  Detuning = 2,
  MirrorLeft = 3,
  MirrorRight = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

class StreamRng {
 public:
  StreamRng(const SampleSeed& seed, Stream stream);

  std::uint64_t next() { return engine_(); }
  double uniform01();
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// FixedCount: exactly round(p N) sites uniformly without replacement.
/// Bernoulli: each site independently with probability p.
Realization sample_occupancy(const LatticeSpec& spec, const SampleSeed& seed);

/// i.i.d. Normal(0, sigma_ih^2); all zeros when sigma_ih == 0.
std::vector<double> sample_detunings(std::size_t n_atoms, double sigma_ih,
                                     const SampleSeed& seed);

/// Occupancy and detunings for one realization index.
Realization sample_realization(const LatticeSpec& spec, double sigma_ih,
                               const SampleSeed& seed);

/// Sorted sample of `count` distinct integers from [0, n) (partial
/// Fisher-Yates). Shared by lattice and mirror occupancy.
std::vector<int> choose_sites(int n, int count, StreamRng& rng);

}  // namespace wgchain

#endif  // WGCHAIN_SAMPLING_HPP
