#include "drofa/rng.hpp"

#include <cmath>

namespace drofa {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamPurpose purpose,
                     std::uint64_t round, std::uint64_t client) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ static_cast<std::uint64_t>(purpose));
  k = splitmix64(k ^ round);
  k = splitmix64(k ^ client);
  key_ = k;
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t x = key_ + counter_ * kGolden;
  ++counter_;
  return splitmix64(splitmix64(x));
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  // rejection-free scaling; bias is negligible for n << 2^64 and keeps
  // the draw count per decision fixed (one u64 per draw)
  return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
}

double RngStream::next_normal() {
  double u1 = next_double();
  double u2 = next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace drofa
