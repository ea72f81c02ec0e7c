#pragma once

#include <array>
#include <cstdint>

namespace sdelab {

// Standard normal quantile (Wichura's AS241 rational approximations,
// accurate to ~1e-15 in double).  Requires p in (0, 1).
double normal_icdf(double p);

namespace detail {
// One 4x32 counter-block cipher round trip (Philox-style, 10 rounds).
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                        const std::array<std::uint32_t, 4>& counter);
}  // namespace detail

// Counter-based random stream.  Every draw is addressed by the tuple
// (base_seed, path_index, step, slot): no mutable state, so ensembles are
// bit-reproducible at any thread count and single paths can be replayed in
// isolation.  Normals are produced by inverse CDF from one 64-bit uniform,
// the single Gaussian transform used project-wide.
class PathRng {
 public:
  PathRng(std::uint64_t base_seed, std::uint32_t path_index)
      : key_(base_seed), path_(path_index) {}

  // Uniform in the open interval (0, 1).
  double uniform(std::uint64_t step, std::uint32_t slot) const;
  double normal(std::uint64_t step, std::uint32_t slot) const;

  std::uint64_t base_seed() const { return key_; }
  std::uint32_t path_index() const { return path_; }

 private:
  std::uint64_t raw64(std::uint64_t step, std::uint32_t slot) const;
  std::uint64_t key_;
  std::uint32_t path_;
};

}  // namespace sdelab
