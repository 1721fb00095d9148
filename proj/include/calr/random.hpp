#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace calr {

// SplitMix64: 64-bit counter state advanced by the golden-ratio increment,
// one multiply-xor-shift avalanche per output. Fast, seedable, and cheap to
// split into independent streams by hashing (seed, replication, purpose).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53 random bits.
  double next_unit();

  // Uniform integer on [0, n), rejection sampled (no modulo bias). n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via the AS 241 inverse CDF applied to next_unit().
  double next_normal();

  // Exponential(1) via the inverse CDF -log1p(-u).
  double next_exponential();

 private:
  std::uint64_t state_;
};

// Stateless SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of the (replication, purpose) substream of a master seed. Distinct
// purposes within a replication and distinct replications get independent
// streams, so adding replications or reordering draws within one purpose
// never perturbs the others.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t replication,
                            std::uint64_t purpose);

enum class SchemeKind { simple, permuted_block, minimization };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::simple;
  double pi = 0.5;                 // target allocation P(arm = 1)
  int block_size = 4;              // permuted_block: block length
  double p_prefer = 0.8;           // minimization: bias toward preferred arm
  std::vector<int> margin_levels;  // minimization: level count per margin

  // Throws InvalidConfig on out-of-range values, including a block_size * pi
  // that is not an integer.
  void validate() const;
};

const char* scheme_name(SchemeKind kind);

// Sequential assignment engine. For permuted_block the z vector is the joint
// stratum key, for minimization one level per margin; simple ignores z.
// Exactly one uniform is drawn per assignment (plus block refills), so the
// sequence is reproducible from (config, seed, z sequence) alone.
class Randomizer {
 public:
  Randomizer(const SchemeConfig& config, std::uint64_t seed);

  int assign_next(const std::vector<int>& z);

 private:
  int assign_block(const std::vector<int>& z);
  int assign_minimization(const std::vector<int>& z);

  SchemeConfig config_;
  Rng rng_;
  std::map<std::vector<int>, std::vector<int>> block_queue_;
  // counts_[margin][level][arm]
  std::vector<std::vector<std::array<long, 2>>> counts_;
};

std::vector<int> assign_all(const SchemeConfig& config,
                            const std::vector<std::vector<int>>& z_rows,
                            std::uint64_t seed);

}  // namespace calr
