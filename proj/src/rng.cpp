#include "copulaboost/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpb {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  engine_.seed(splitmix64(s));
}

RngStream RngStream::derive(std::uint64_t id) const {
  std::uint64_t s = seed_;
  std::uint64_t h = splitmix64(s);
  std::uint64_t mixed = h ^ (id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  std::uint64_t m = mixed;
  return RngStream(splitmix64(m));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::domain_error("uniform_int: bound must be positive");
  const std::uint64_t threshold = (-bound) % bound;  // reject to kill modulo bias
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

double RngStream::uniform() {
  // 53 mantissa bits, offset half a ulp so 0 and 1 are excluded
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be positive");
  if (shape < 1.0) {
    // boost to shape+1 and shrink by U^{1/shape}
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<int> RngStream::permutation(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

std::vector<int> RngStream::subsample(int n, int k) {
  if (k < 0 || k > n) throw std::domain_error("subsample: need 0 <= k <= n");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace cpb
