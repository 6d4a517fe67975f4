#include "wgchain/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wgchain {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t stream_key(const SampleSeed& seed, Stream stream) {
  std::uint64_t h = splitmix64(seed.master_seed);
  h = splitmix64(h ^ seed.realization_index);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

}  // namespace

StreamRng::StreamRng(const SampleSeed& seed, Stream stream)
    : engine_(stream_key(seed, stream)) {}

double StreamRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t StreamRng::below(std::uint64_t n) {
  // Lemire, "Fast random integer generation in an interval" (2019).
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double StreamRng::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
}

std::vector<int> choose_sites(int n, int count, StreamRng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Realization sample_occupancy(const LatticeSpec& spec, const SampleSeed& seed) {
  spec.validate();
  StreamRng rng(seed, Stream::Occupancy);
  Realization real;
  if (spec.mode == FillingMode::FixedCount) {
    real.occupied_sites = choose_sites(spec.n_sites, spec.fixed_count(), rng);
  } else {
    for (int m = 0; m < spec.n_sites; ++m) {
      if (rng.uniform01() < spec.filling) real.occupied_sites.push_back(m);
    }
  }
  real.detunings.assign(real.occupied_sites.size(), 0.0);
  return real;
}

std::vector<double> sample_detunings(std::size_t n_atoms, double sigma_ih,
                                     const SampleSeed& seed) {
  std::vector<double> out(n_atoms, 0.0);
  if (sigma_ih == 0.0) return out;
  StreamRng rng(seed, Stream::Detuning);
  for (auto& d : out) d = sigma_ih * rng.normal();
  return out;
}

Realization sample_realization(const LatticeSpec& spec, double sigma_ih,
                               const SampleSeed& seed) {
  Realization real = sample_occupancy(spec, seed);
  real.detunings = sample_detunings(real.size(), sigma_ih, seed);
  return real;
}

}  // namespace wgchain
