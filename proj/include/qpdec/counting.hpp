#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qpdec/forms.hpp"
#include "qpdec/rational.hpp"

namespace qpdec::counting {

using qpdec::BigInt;

// Lattice point of the surface (x, y, z, P(x,y,z), Q(x,y,z)).
struct SurfacePoint {
  int32_t x, y, z;
  int64_t p_val, q_val;
};

enum class CountMethod { BruteForce, HashEnergy, DivisorMethod, StripEnergy };
const char* to_string(CountMethod m);

struct CountRecord {
  long N = 0;
  int s = 0;
  BigInt count;
  CountMethod method = CountMethod::HashEnergy;
  double seconds = 0;
};

// All (N+1)^3 points with exact integer P, Q values, in x-major order.
// Throws NonIntegerCoefficients unless both forms have integer coefficients.
std::vector<SurfacePoint> surface_points(const formalg::FormPair& pair, long N);

// Layout of the 5-sum key (Sx, Sy, Sz, SP, SQ) in one 64-bit word. Widths are
// computed from the point set and tuple length; construction fails with
// PackingOverflow when the fields do not fit injectively.
class KeyPacking {
 public:
  KeyPacking(std::span<const SurfacePoint> points, int s);

  uint64_t pack(int64_t sx, int64_t sy, int64_t sz, int64_t sp, int64_t sq) const;
  // Partition-local key: (Sz, SP, SQ) only, for kernels that fix (Sx, Sy).
  uint64_t pack_zpq(int64_t sz, int64_t sp, int64_t sq) const;

  int64_t min_p() const { return min_p_; }
  int64_t min_q() const { return min_q_; }
  uint64_t zpq_keyspace() const { return zpq_keyspace_; }

 private:
  int64_t min_p_ = 0, min_q_ = 0;
  int shift_y_ = 0, shift_x_ = 0;      // full key layout
  int shift_p_ = 0, shift_z_ = 0;      // zpq layout (shared low bits)
  uint64_t zpq_keyspace_ = 0;
};

struct EnergyOptions {
  enum class Strategy { Auto, HashTable, SortChunks };
  Strategy strategy = Strategy::Auto;
  std::size_t memory_budget_bytes = std::size_t(8) << 30;
  int threads = 0;  // 0 keeps the OpenMP default
};

// Exact additive energy J = sum_v r_s(v)^2 over s-tuples of points, keyed by
// the packed 5-sum. OpenMP-parallel over linear-sum partitions; bit-identical
// for any thread count and either accumulation strategy.
CountRecord energy_count(std::span<const SurfacePoint> points, int s, const EnergyOptions& opts = {});

// Serial reference: one flat map over all s-tuples. Kept for tests.
CountRecord energy_count_serial(std::span<const SurfacePoint> points, int s);

// Ground-truth oracle: loops over all 2s-tuples and checks the five
// equations. Pre: (N+1)^(6s) <= 1e9 (ScaleTooLarge otherwise).
CountRecord brute_force_energy(std::span<const SurfacePoint> points, int s);

// Exact J for the pair (r^2, s^2+rt) at s = 2 by divisor enumeration over the
// critical offset C = (x1-x2)(z1-z3). Gated by oracle equality with
// energy_count; any discrepancy is a bug in this routine.
CountRecord fast_count_parabolic(long N);

struct DivisorTable {
  std::vector<std::vector<int64_t>> divisors;  // divisors[c-1] lists divisors of c
  BigInt total;                                // sum of d(c) for c = 1..M
};
DivisorTable divisor_table(long M);

// Discrete analogue of the thin-strip example: additive quadruples of
// Phi(n1,n2) = (n1, n2, n1^2, n1*n2) with n1 in [0, floor(sqrt(N))], n2 in [0, N].
CountRecord strip_energy(long N);

struct OverlapReport {
  double max_ratio = 0;            // max of |dr|/(K*delta), |dt|/(K^2*delta)
  uint64_t pair_count = 0;         // tuples per side
  uint64_t near_collisions = 0;    // tuple pairs within delta componentwise
};

// Finite check of the bounded-overlap property for sums from strips j = 0 and
// j' at horizontal scale 1/K on a delta-grid. Uses bucket matching; throws
// ScaleTooLarge beyond 1e8 candidate evaluations.
OverlapReport transversality_overlap(int K, long delta_inv, int j_prime = 2);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
};

// Least-squares slope of log(value) against log(N). Throws DegenerateInput on
// fewer than 3 samples, non-increasing N, or nonpositive values.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& samples);
FitResult fit_exponent_counts(const std::vector<std::pair<long, BigInt>>& samples);

bool is_canonical_parabolic(const formalg::FormPair& pair);

// Dispatcher: divisor method for the canonical parabolic pair at s = 2,
// energy_count otherwise.
CountRecord count_auto(const formalg::FormPair& pair, long N, int s, const EnergyOptions& opts = {});

}  // namespace qpdec::counting
