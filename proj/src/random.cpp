#include "calr/random.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "calr/error.hpp"
#include "calr/stats.hpp"

namespace calr {

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  // Rejection sampling kills the modulo bias; for the tiny n used here the
  // reject branch is essentially never taken.
  std::uint64_t x, r;
  do {
    x = next_u64();
    r = x % n;
  } while (x - r > UINT64_MAX - (n - 1));
  return r;
}

double Rng::next_normal() {
  double u;
  do {
    u = next_unit();
  } while (u <= 0.0);
  return normal_quantile(u);
}

double Rng::next_exponential() { return -std::log1p(-next_unit()); }

// Murmur-style 64-bit finalizer: bijective, full avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDull;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ull;
  z ^= z >> 33;
  return z;
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t replication,
                            std::uint64_t purpose) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
  h = mix64(h ^ (replication + 0xD1B54A32D192ED03ull));
  h = mix64(h ^ (purpose + 0x8CB92BA72F3D8DD7ull));
  return h;
}

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::simple: return "simple";
    case SchemeKind::permuted_block: return "permuted_block";
    case SchemeKind::minimization: return "minimization";
  }
  return "unknown";
}

void SchemeConfig::validate() const {
  if (!(pi > 0.0 && pi < 1.0)) {
    fail(ErrorCode::InvalidConfig, "pi must lie in (0, 1)");
  }
  if (kind == SchemeKind::permuted_block) {
    if (block_size < 2) {
      fail(ErrorCode::InvalidConfig, "block_size must be at least 2");
    }
    const double ones = block_size * pi;
    if (std::fabs(ones - std::round(ones)) > 1e-9) {
      fail(ErrorCode::InvalidConfig,
           "block_size * pi must be an integer (got " + std::to_string(ones) +
               ")");
    }
  }
  if (kind == SchemeKind::minimization) {
    if (!(p_prefer >= 0.5 && p_prefer <= 1.0)) {
      fail(ErrorCode::InvalidConfig, "p_prefer must lie in [0.5, 1]");
    }
    if (margin_levels.empty()) {
      fail(ErrorCode::InvalidConfig, "minimization needs margin_levels");
    }
    for (int m : margin_levels) {
      if (m < 1) fail(ErrorCode::InvalidConfig, "margin level count must be >= 1");
    }
  }
}

Randomizer::Randomizer(const SchemeConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
  config_.validate();
  if (config_.kind == SchemeKind::minimization) {
    counts_.resize(config_.margin_levels.size());
    for (std::size_t m = 0; m < counts_.size(); ++m) {
      counts_[m].assign(config_.margin_levels[m], {0, 0});
    }
  }
}

int Randomizer::assign_next(const std::vector<int>& z) {
  switch (config_.kind) {
    case SchemeKind::simple:
      return rng_.next_unit() < config_.pi ? 1 : 0;
    case SchemeKind::permuted_block:
      return assign_block(z);
    case SchemeKind::minimization:
      return assign_minimization(z);
  }
  fail(ErrorCode::InvalidConfig, "unknown scheme");
}

int Randomizer::assign_block(const std::vector<int>& z) {
  std::vector<int>& queue = block_queue_[z];
  if (queue.empty()) {
    const int m = config_.block_size;
    const int ones = static_cast<int>(std::lround(m * config_.pi));
    queue.assign(m, 0);
    for (int i = 0; i < ones; ++i) queue[i] = 1;
    for (int i = m - 1; i > 0; --i) {
      std::swap(queue[i], queue[rng_.next_below(i + 1)]);
    }
  }
  const int arm = queue.back();
  queue.pop_back();
  return arm;
}

int Randomizer::assign_minimization(const std::vector<int>& z) {
  const std::size_t margins = config_.margin_levels.size();
  if (z.size() != margins) {
    fail(ErrorCode::InvalidMarginVector,
         "expected " + std::to_string(margins) + " margin levels, got " +
             std::to_string(z.size()));
  }
  for (std::size_t m = 0; m < margins; ++m) {
    if (z[m] < 0 || z[m] >= config_.margin_levels[m]) {
      fail(ErrorCode::InvalidMarginVector,
           "margin " + std::to_string(m) + " level " + std::to_string(z[m]) +
               " out of range");
    }
  }
  // Sum of absolute marginal imbalances after a hypothetical assignment.
  long imb1 = 0, imb0 = 0;
  for (std::size_t m = 0; m < margins; ++m) {
    const auto& c = counts_[m][z[m]];
    imb1 += std::labs((c[1] + 1) - c[0]);
    imb0 += std::labs(c[1] - (c[0] + 1));
  }
  const double u = rng_.next_unit();
  int arm;
  if (imb1 < imb0) {
    arm = u < config_.p_prefer ? 1 : 0;
  } else if (imb0 < imb1) {
    arm = u < config_.p_prefer ? 0 : 1;
  } else {
    arm = u < 0.5 ? 1 : 0;
  }
  for (std::size_t m = 0; m < margins; ++m) counts_[m][z[m]][arm] += 1;
  return arm;
}

std::vector<int> assign_all(const SchemeConfig& config,
                            const std::vector<std::vector<int>>& z_rows,
                            std::uint64_t seed) {
  Randomizer r(config, seed);
  std::vector<int> arms;
  arms.reserve(z_rows.size());
  for (const auto& z : z_rows) arms.push_back(r.assign_next(z));
  return arms;
}

}  // namespace calr
