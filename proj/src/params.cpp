#include "gaitface/params.hpp"

#include <cmath>
#include <random>

#include "gaitface/errors.hpp"

namespace gaitface {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ h);
}

ad::Mat uniform_fan_in(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in,
                       std::uint64_t seed) {
  if (rows <= 0 || cols <= 0 || fan_in <= 0)
    throw InvalidConfig("uniform_fan_in: non-positive dimensions");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  ad::Mat out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = dist(rng);
  return out;
}

}  // namespace gaitface
