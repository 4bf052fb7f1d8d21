#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace tubecurv {

// Philox4x64-10 counter-based generator. Pure function of (counter, key),
// which makes streams splittable: every (experiment, trial, role) tuple gets
// its own key and the streams are independent by construction.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

std::uint64_t splitmix64(std::uint64_t& state);

// Derives a stream tag by hashing the id parts together.
std::uint64_t stream_tag(std::initializer_list<std::uint64_t> parts);

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t tag);

  std::uint64_t next_u64();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  std::int64_t poisson(double lambda);

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> buffer_{};
  int pos_ = 4;  // forces refill on first use
};

}  // namespace tubecurv
