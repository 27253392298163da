#include "qpdec/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpdec/errors.hpp"

namespace qpdec::counting {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

int bits_for(u64 range) {
  int b = 0;
  while (range > 0) {
    ++b;
    range >>= 1;
  }
  return b;
}

u64 next_pow2(u64 v) {
  u64 p = 1;
  while (p < v) p <<= 1;
  return p;
}

u64 mix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Open-addressing (key, count) table. Counts of zero mark empty slots, which
// is safe because every inserted key has count >= 1.
class HashAccumulator {
 public:
  void reserve_keys(u64 expected) {
    u64 cap = next_pow2(std::max<u64>(64, expected + expected / 2));
    if (cap > keys_.size()) rehash(cap);
  }

  void add(u64 key) {
    if ((used_.size() + 1) * 5 > keys_.size() * 3) rehash(keys_.size() * 2);
    u64 mask = keys_.size() - 1;
    u64 i = mix64(key) & mask;
    while (true) {
      if (counts_[i] == 0) {
        keys_[i] = key;
        counts_[i] = 1;
        used_.push_back(static_cast<uint32_t>(i));
        return;
      }
      if (keys_[i] == key) {
        ++counts_[i];
        return;
      }
      i = (i + 1) & mask;
    }
  }

  u128 sum_of_squares_and_clear() {
    u128 total = 0;
    for (uint32_t slot : used_) {
      u128 c = counts_[slot];
      total += c * c;
      counts_[slot] = 0;
    }
    used_.clear();
    return total;
  }

  static std::size_t bytes_for(u64 expected) {
    u64 cap = next_pow2(std::max<u64>(64, expected + expected / 2));
    return cap * 16 + expected * 4;
  }

 private:
  void rehash(u64 cap) {
    if (keys_.empty()) {
      keys_.assign(cap, 0);
      counts_.assign(cap, 0);
      return;
    }
    std::vector<u64> old_keys = std::move(keys_);
    std::vector<u64> old_counts = std::move(counts_);
    std::vector<uint32_t> old_used = std::move(used_);
    keys_.assign(cap, 0);
    counts_.assign(cap, 0);
    used_.clear();
    used_.reserve(old_used.size() * 2);
    u64 mask = cap - 1;
    for (uint32_t slot : old_used) {
      u64 key = old_keys[slot];
      u64 count = old_counts[slot];
      u64 i = mix64(key) & mask;
      while (counts_[i] != 0) i = (i + 1) & mask;
      keys_[i] = key;
      counts_[i] = count;
      used_.push_back(static_cast<uint32_t>(i));
    }
  }

  std::vector<u64> keys_;
  std::vector<u64> counts_;
  std::vector<uint32_t> used_;
};

// Buffer-and-sort accumulator; same contract as HashAccumulator.
class SortAccumulator {
 public:
  void reserve_keys(u64 expected) { buf_.reserve(expected); }
  void add(u64 key) { buf_.push_back(key); }

  u128 sum_of_squares_and_clear() {
    std::sort(buf_.begin(), buf_.end());
    u128 total = 0;
    std::size_t i = 0;
    while (i < buf_.size()) {
      std::size_t j = i + 1;
      while (j < buf_.size() && buf_[j] == buf_[i]) ++j;
      u128 c = j - i;
      total += c * c;
      i = j;
    }
    buf_.clear();
    return total;
  }

  static std::size_t bytes_for(u64 expected) { return expected * 8; }

 private:
  std::vector<u64> buf_;
};

}  // namespace

const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::BruteForce: return "brute";
    case CountMethod::HashEnergy: return "hash";
    case CountMethod::DivisorMethod: return "divisor";
    case CountMethod::StripEnergy: return "strip";
  }
  return "?";
}

std::vector<SurfacePoint> surface_points(const formalg::FormPair& pair, long n) {
  if (n < 0) throw DegenerateInput("N must be nonnegative");
  if (!pair.first.has_integer_coeffs() || !pair.second.has_integer_coeffs())
    throw NonIntegerCoefficients("surface points require integer-coefficient forms");
  if (n > 2000) throw ScaleTooLarge("N too large for point enumeration");

  // Integer coefficient views (rr, ss, tt, rs, rt, st).
  int64_t pc[6], qc[6];
  auto pv = pair.first.coeff_vector();
  auto qv = pair.second.coeff_vector();
  for (int i = 0; i < 6; ++i) {
    pc[i] = to_long(pv[i].get_num());
    qc[i] = to_long(qv[i].get_num());
  }
  auto eval = [](const int64_t c[6], int64_t x, int64_t y, int64_t z) {
    return c[0] * x * x + c[1] * y * y + c[2] * z * z + c[3] * x * y + c[4] * x * z + c[5] * y * z;
  };

  std::vector<SurfacePoint> pts;
  pts.reserve(static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)));
  for (long x = 0; x <= n; ++x)
    for (long y = 0; y <= n; ++y)
      for (long z = 0; z <= n; ++z)
        pts.push_back(SurfacePoint{static_cast<int32_t>(x), static_cast<int32_t>(y),
                                   static_cast<int32_t>(z), eval(pc, x, y, z), eval(qc, x, y, z)});
  return pts;
}

KeyPacking::KeyPacking(std::span<const SurfacePoint> points, int s) {
  if (points.empty()) throw DegenerateInput("empty point set");
  if (s < 1 || s > 3) throw DegenerateInput("tuple length s must be 1, 2 or 3");
  int64_t max_x = 0, max_y = 0, max_z = 0;
  int64_t min_p = points[0].p_val, max_p = points[0].p_val;
  int64_t min_q = points[0].q_val, max_q = points[0].q_val;
  for (const SurfacePoint& p : points) {
    max_x = std::max<int64_t>(max_x, p.x);
    max_y = std::max<int64_t>(max_y, p.y);
    max_z = std::max<int64_t>(max_z, p.z);
    min_p = std::min(min_p, p.p_val);
    max_p = std::max(max_p, p.p_val);
    min_q = std::min(min_q, p.q_val);
    max_q = std::max(max_q, p.q_val);
  }
  min_p_ = s * min_p;
  min_q_ = s * min_q;
  u64 range_x = static_cast<u64>(s * max_x);
  u64 range_y = static_cast<u64>(s * max_y);
  u64 range_z = static_cast<u64>(s * max_z);
  u64 range_p = static_cast<u64>(s * (max_p - min_p));
  u64 range_q = static_cast<u64>(s * (max_q - min_q));

  int wq = bits_for(range_q);
  int wp = bits_for(range_p);
  int wz = bits_for(range_z);
  int wy = bits_for(range_y);
  int wx = bits_for(range_x);
  shift_p_ = wq;
  shift_z_ = wq + wp;
  shift_y_ = shift_z_ + wz;
  shift_x_ = shift_y_ + wy;
  if (shift_x_ + wx > 64)
    throw PackingOverflow("sum key needs " + std::to_string(shift_x_ + wx) + " bits");
  zpq_keyspace_ = (range_z + 1) * (range_p + 1) * (range_q + 1);
}

uint64_t KeyPacking::pack(int64_t sx, int64_t sy, int64_t sz, int64_t sp, int64_t sq) const {
  return (static_cast<u64>(sx) << shift_x_) | (static_cast<u64>(sy) << shift_y_) |
         pack_zpq(sz, sp, sq);
}

uint64_t KeyPacking::pack_zpq(int64_t sz, int64_t sp, int64_t sq) const {
  return (static_cast<u64>(sz) << shift_z_) | (static_cast<u64>(sp - min_p_) << shift_p_) |
         static_cast<u64>(sq - min_q_);
}

namespace {

// Full-grid geometry: points generated by surface_points in x-major order.
struct GridView {
  long n = -1;
  std::span<const SurfacePoint> points;

  static std::optional<GridView> detect(std::span<const SurfacePoint> points) {
    double side = std::cbrt(static_cast<double>(points.size()));
    long n = std::lround(side) - 1;
    if (n < 0 || static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)) != points.size())
      return std::nullopt;
    for (std::size_t i = 0; i < points.size(); ++i) {
      long z = static_cast<long>(i) % (n + 1);
      long y = (static_cast<long>(i) / (n + 1)) % (n + 1);
      long x = static_cast<long>(i) / ((n + 1) * (n + 1));
      if (points[i].x != x || points[i].y != y || points[i].z != z) return std::nullopt;
    }
    return GridView{n, points};
  }

  const SurfacePoint* row(long x, long y) const {
    return points.data() + (x * (n + 1) + y) * (n + 1);
  }
};

long section_count(long n, int s, long total) {
  // Number of s-tuples of values in [0, n] with the given sum.
  if (s == 2) return (total <= n) ? total + 1 : 2 * n + 1 - total;
  long c = 0;
  for (long a = std::max<long>(0, total - 2 * n); a <= std::min(n, total); ++a)
    c += (total - a <= n) ? (total - a) + 1 : 2 * n + 1 - (total - a);
  return c;
}

u64 max_partition_tuples(long n, int s) {
  u64 best = 0;
  for (long v = 0; v <= s * n; ++v) best = std::max<u64>(best, section_count(n, s, v));
  u64 cells = static_cast<u64>(n + 1);
  u64 zfree = 1;
  for (int i = 0; i < s; ++i) zfree *= cells;
  return best * best * zfree;
}

template <typename Acc>
u128 grid_energy_s2(const GridView& grid, const KeyPacking& packing, u64 expected, int threads) {
  const long n = grid.n;
  const long parts = (2 * n + 1) * (2 * n + 1);
  u128 total = 0;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads) reduction(+ : total)
#endif
  {
    Acc acc;
    acc.reserve_keys(expected);
    u128 local = 0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (long part = 0; part < parts; ++part) {
      const long sx = part / (2 * n + 1);
      const long sy = part % (2 * n + 1);
      for (long x1 = std::max<long>(0, sx - n); x1 <= std::min(n, sx); ++x1) {
        const long x2 = sx - x1;
        for (long y1 = std::max<long>(0, sy - n); y1 <= std::min(n, sy); ++y1) {
          const long y2 = sy - y1;
          const SurfacePoint* row1 = grid.row(x1, y1);
          const SurfacePoint* row2 = grid.row(x2, y2);
          for (long z1 = 0; z1 <= n; ++z1) {
            const int64_t p1 = row1[z1].p_val;
            const int64_t q1 = row1[z1].q_val;
            for (long z2 = 0; z2 <= n; ++z2)
              acc.add(packing.pack_zpq(z1 + z2, p1 + row2[z2].p_val, q1 + row2[z2].q_val));
          }
        }
      }
      local += acc.sum_of_squares_and_clear();
    }
    total += local;
  }
  return total;
}

template <typename Acc>
u128 grid_energy_s3(const GridView& grid, const KeyPacking& packing, u64 expected, int threads) {
  const long n = grid.n;
  const long span = 3 * n + 1;
  const long parts = span * span;
  u128 total = 0;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads) reduction(+ : total)
#endif
  {
    Acc acc;
    acc.reserve_keys(expected);
    u128 local = 0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (long part = 0; part < parts; ++part) {
      const long sx = part / span;
      const long sy = part % span;
      for (long x1 = 0; x1 <= std::min(n, sx); ++x1)
        for (long x2 = std::max<long>(0, sx - x1 - n); x2 <= std::min(n, sx - x1); ++x2) {
          const long x3 = sx - x1 - x2;
          if (x3 < 0 || x3 > n) continue;
          for (long y1 = 0; y1 <= std::min(n, sy); ++y1)
            for (long y2 = std::max<long>(0, sy - y1 - n); y2 <= std::min(n, sy - y1); ++y2) {
              const long y3 = sy - y1 - y2;
              if (y3 < 0 || y3 > n) continue;
              const SurfacePoint* row1 = grid.row(x1, y1);
              const SurfacePoint* row2 = grid.row(x2, y2);
              const SurfacePoint* row3 = grid.row(x3, y3);
              for (long z1 = 0; z1 <= n; ++z1)
                for (long z2 = 0; z2 <= n; ++z2) {
                  const int64_t p12 = row1[z1].p_val + row2[z2].p_val;
                  const int64_t q12 = row1[z1].q_val + row2[z2].q_val;
                  const long z12 = z1 + z2;
                  for (long z3 = 0; z3 <= n; ++z3)
                    acc.add(packing.pack_zpq(z12 + z3, p12 + row3[z3].p_val, q12 + row3[z3].q_val));
                }
            }
        }
      local += acc.sum_of_squares_and_clear();
    }
    total += local;
  }
  return total;
}

template <typename Acc>
u128 flat_energy(std::span<const SurfacePoint> points, int s, const KeyPacking& packing, u64 expected) {
  Acc acc;
  acc.reserve_keys(expected);
  const std::size_t m = points.size();
  std::array<std::size_t, 3> idx{0, 0, 0};
  while (true) {
    int64_t sx = 0, sy = 0, sz = 0, sp = 0, sq = 0;
    for (int k = 0; k < s; ++k) {
      const SurfacePoint& p = points[idx[k]];
      sx += p.x;
      sy += p.y;
      sz += p.z;
      sp += p.p_val;
      sq += p.q_val;
    }
    acc.add(packing.pack(sx, sy, sz, sp, sq));
    int k = s - 1;
    while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
    if (k < 0) break;
  }
  return acc.sum_of_squares_and_clear();
}

long derive_n(std::span<const SurfacePoint> points) {
  long n = 0;
  for (const SurfacePoint& p : points) n = std::max<long>(n, std::max({p.x, p.y, p.z}));
  return n;
}

u64 checked_pow(u64 base, int exp, u64 limit) {
  u64 v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > limit / base) return limit + 1;
    v *= base;
  }
  return v;
}

}  // namespace

CountRecord energy_count(std::span<const SurfacePoint> points, int s, const EnergyOptions& opts) {
  auto start = Clock::now();
  KeyPacking packing(points, s);
  const int threads = resolve_threads(opts.threads);
  auto grid = GridView::detect(points);

  u64 expected;  // keys held at once, per worker
  if (grid && s >= 2) {
    expected = std::min<u64>(max_partition_tuples(grid->n, s), packing.zpq_keyspace());
  } else {
    u64 tuples = checked_pow(points.size(), s, u64(1) << 62);
    expected = tuples;
  }

  EnergyOptions::Strategy strategy = opts.strategy;
  const int workers = (grid && s >= 2) ? threads : 1;
  if (strategy == EnergyOptions::Strategy::Auto) {
    if (HashAccumulator::bytes_for(expected) * workers <= opts.memory_budget_bytes)
      strategy = EnergyOptions::Strategy::HashTable;
    else if (SortAccumulator::bytes_for(expected) * workers <= opts.memory_budget_bytes)
      strategy = EnergyOptions::Strategy::SortChunks;
    else
      throw MemoryBudgetExceeded("estimated key-set size exceeds the memory budget");
  } else {
    std::size_t need = strategy == EnergyOptions::Strategy::HashTable
                           ? HashAccumulator::bytes_for(expected) * workers
                           : SortAccumulator::bytes_for(expected) * workers;
    if (need > opts.memory_budget_bytes)
      throw MemoryBudgetExceeded("estimated key-set size exceeds the memory budget");
  }

  u128 total;
  if (grid && s == 2) {
    total = strategy == EnergyOptions::Strategy::HashTable
                ? grid_energy_s2<HashAccumulator>(*grid, packing, expected, threads)
                : grid_energy_s2<SortAccumulator>(*grid, packing, expected, threads);
  } else if (grid && s == 3) {
    total = strategy == EnergyOptions::Strategy::HashTable
                ? grid_energy_s3<HashAccumulator>(*grid, packing, expected, threads)
                : grid_energy_s3<SortAccumulator>(*grid, packing, expected, threads);
  } else {
    total = strategy == EnergyOptions::Strategy::HashTable
                ? flat_energy<HashAccumulator>(points, s, packing, expected)
                : flat_energy<SortAccumulator>(points, s, packing, expected);
  }

  return CountRecord{derive_n(points), s, u128_to_bigint(total), CountMethod::HashEnergy,
                     seconds_since(start)};
}

CountRecord energy_count_serial(std::span<const SurfacePoint> points, int s) {
  auto start = Clock::now();
  KeyPacking packing(points, s);
  std::unordered_map<u64, u64> table;
  const std::size_t m = points.size();
  std::array<std::size_t, 3> idx{0, 0, 0};
  while (true) {
    int64_t sx = 0, sy = 0, sz = 0, sp = 0, sq = 0;
    for (int k = 0; k < s; ++k) {
      const SurfacePoint& p = points[idx[k]];
      sx += p.x;
      sy += p.y;
      sz += p.z;
      sp += p.p_val;
      sq += p.q_val;
    }
    ++table[packing.pack(sx, sy, sz, sp, sq)];
    int k = s - 1;
    while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
    if (k < 0) break;
  }
  u128 total = 0;
  for (const auto& [key, c] : table) total += u128(c) * c;
  return CountRecord{derive_n(points), s, u128_to_bigint(total), CountMethod::HashEnergy,
                     seconds_since(start)};
}

CountRecord brute_force_energy(std::span<const SurfacePoint> points, int s) {
  auto start = Clock::now();
  if (s < 1 || s > 3) throw DegenerateInput("tuple length s must be 1, 2 or 3");
  const std::size_t m = points.size();
  if (checked_pow(m, 2 * s, 1000000000ull) > 1000000000ull)
    throw ScaleTooLarge("brute-force oracle limited to (N+1)^(6s) <= 1e9");

  u128 count = 0;
  const SurfacePoint* pt = points.data();

  if (s == 2) {
    long long found = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : found)
#endif
    for (std::size_t i1 = 0; i1 < m; ++i1) {
      for (std::size_t i2 = 0; i2 < m; ++i2) {
        const int64_t sx = pt[i1].x + pt[i2].x;
        const int64_t sy = pt[i1].y + pt[i2].y;
        const int64_t sz = pt[i1].z + pt[i2].z;
        const int64_t sp = pt[i1].p_val + pt[i2].p_val;
        const int64_t sq = pt[i1].q_val + pt[i2].q_val;
        for (std::size_t i3 = 0; i3 < m; ++i3)
          for (std::size_t i4 = 0; i4 < m; ++i4)
            found += pt[i3].x + pt[i4].x == sx && pt[i3].y + pt[i4].y == sy &&
                     pt[i3].z + pt[i4].z == sz && pt[i3].p_val + pt[i4].p_val == sp &&
                     pt[i3].q_val + pt[i4].q_val == sq;
      }
    }
    count = static_cast<u128>(found);
  } else {
    const int half = s;
    std::array<std::size_t, 6> idx{};
    idx.fill(0);
    const int total_vars = 2 * s;
    while (true) {
      int64_t sums[5] = {0, 0, 0, 0, 0};
      for (int k = 0; k < total_vars; ++k) {
        const SurfacePoint& p = pt[idx[k]];
        const int sign = k < half ? 1 : -1;
        sums[0] += sign * p.x;
        sums[1] += sign * p.y;
        sums[2] += sign * p.z;
        sums[3] += sign * p.p_val;
        sums[4] += sign * p.q_val;
      }
      count += sums[0] == 0 && sums[1] == 0 && sums[2] == 0 && sums[3] == 0 && sums[4] == 0;
      int k = total_vars - 1;
      while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
      if (k < 0) break;
    }
  }

  return CountRecord{derive_n(points), s, u128_to_bigint(count), CountMethod::BruteForce,
                     seconds_since(start)};
}

DivisorTable divisor_table(long m) {
  if (m < 1) throw DegenerateInput("divisor table needs M >= 1");
  DivisorTable t;
  t.divisors.resize(m);
  long total = 0;
  for (long d = 1; d <= m; ++d)
    for (long v = d; v <= m; v += d) {
      t.divisors[v - 1].push_back(d);
      ++total;
    }
  t.total = total;
  return t;
}

namespace {

// Number of y-quadruples of the critical system for a fixed offset C != 0:
// y1 - y3 = y4 - y2 = D with D | C, and y2 + y4 = y1 + y3 + C/D.
int64_t y_quadruples(long n, long c, const DivisorTable& table) {
  int64_t count = 0;
  for (int64_t d : table.divisors[c - 1]) {
    const int64_t e = c / d;
    if (e % 2 != 0) continue;  // parity obstruction: no integral y2, y4
    for (int sign = 0; sign < 2; ++sign) {
      const int64_t ds = sign ? -d : d;
      const int64_t h = sign ? -e / 2 : e / 2;
      const int64_t lo = std::max({int64_t(0), -ds, -h, -ds - h});
      const int64_t hi = std::min({int64_t(n), n - ds, n - h, n - ds - h});
      if (hi >= lo) count += hi - lo + 1;
    }
  }
  return count;
}

}  // namespace

CountRecord fast_count_parabolic(long n) {
  auto start = Clock::now();
  if (n < 0) throw DegenerateInput("N must be nonnegative");
  if (n > 1400) throw ScaleTooLarge("exact count would overflow the 128-bit accumulator");

  const int64_t y0 = 2 * (n + 1) * (n + 1) - (n + 1);  // multiset-equal y-pairs
  std::vector<int64_t> y_memo;
  DivisorTable table;
  if (n >= 1) {
    table = divisor_table(n * n);
    y_memo.assign(n * n + 1, -1);
  }

  u128 j = 0;
  for (long a = 0; a <= n; ++a) {
    // axis multiplicity (a and -a) times the two x-permutations
    const u128 x_weight = (a == 0 ? 1 : 2) * (a == 0 ? u128(1) : u128(2)) * u128(n + 1 - a);
    for (long e = 0; e <= n; ++e) {
      const u128 z_weight = (e == 0 ? 1 : 2) * u128(n + 1 - e) * u128(n + 1 - e);
      const long c = a * e;
      int64_t y;
      if (c == 0) {
        y = y0;
      } else {
        if (y_memo[c] < 0) y_memo[c] = y_quadruples(n, c, table);
        y = y_memo[c];
      }
      j += x_weight * z_weight * static_cast<u128>(y);
    }
  }
  return CountRecord{n, 2, u128_to_bigint(j), CountMethod::DivisorMethod, seconds_since(start)};
}

CountRecord strip_energy(long n) {
  auto start = Clock::now();
  if (n < 0) throw DegenerateInput("N must be nonnegative");
  long k = static_cast<long>(std::sqrt(static_cast<double>(n)));
  while ((k + 1) * (k + 1) <= n) ++k;
  while (k * k > n) --k;

  struct StripPoint {
    int64_t n1, n2, n1sq, prod;
  };
  std::vector<StripPoint> pts;
  pts.reserve((k + 1) * (n + 1));
  for (long a = 0; a <= k; ++a)
    for (long b = 0; b <= n; ++b) pts.push_back(StripPoint{a, b, a * a, a * b});
  const std::size_t m = pts.size();
  if (m * m > 400000000ull) throw ScaleTooLarge("strip energy pair table too large");

  const int w2 = bits_for(2 * n);
  const int w3 = bits_for(2 * k * k);
  const int w4 = bits_for(2 * k * n);
  const int shift4 = 0, shift3 = w4, shift2 = w4 + w3, shift1 = w4 + w3 + w2;
  if (shift1 + bits_for(2 * k) > 64) throw PackingOverflow("strip key too wide");

  HashAccumulator acc;
  acc.reserve_keys(std::min<u64>(m * m, u64(1) << 26));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const u64 key = (static_cast<u64>(pts[i].n1 + pts[j].n1) << shift1) |
                      (static_cast<u64>(pts[i].n2 + pts[j].n2) << shift2) |
                      (static_cast<u64>(pts[i].n1sq + pts[j].n1sq) << shift3) |
                      (static_cast<u64>(pts[i].prod + pts[j].prod) << shift4);
      acc.add(key);
    }
  u128 total = acc.sum_of_squares_and_clear();
  return CountRecord{n, 2, u128_to_bigint(total), CountMethod::StripEnergy, seconds_since(start)};
}

OverlapReport transversality_overlap(int k, long delta_inv, int j_prime) {
  if (k < 4) throw DegenerateInput("K must be at least 4");
  if (j_prime < 2) throw DegenerateInput("strips must satisfy |j - j'| >= 2");
  if (delta_inv < 4 * k || delta_inv % k != 0)
    throw DegenerateInput("grid needs delta_inv >= 4K and divisible by K");

  // Work in integer units of delta; r = i * delta, t = j * delta.
  const long ri = delta_inv / k;  // grid steps across one strip
  struct PairSum {
    int32_t i1, j1, i2, j2;
    int64_t si, sj, sq, sp;
  };
  std::vector<PairSum> pairs;
  const long i2_lo = j_prime * ri, i2_hi = (j_prime + 1) * ri;
  pairs.reserve((ri + 1) * (delta_inv + 1) * (ri + 1) * (delta_inv + 1) / 4 + 16);
  for (long i1 = 0; i1 <= ri; ++i1)
    for (long j1 = 0; j1 <= delta_inv; ++j1)
      for (long i2 = i2_lo; i2 <= i2_hi; ++i2)
        for (long j2 = 0; j2 <= delta_inv; ++j2)
          pairs.push_back(PairSum{static_cast<int32_t>(i1), static_cast<int32_t>(j1),
                                  static_cast<int32_t>(i2), static_cast<int32_t>(j2), i1 + i2,
                                  j1 + j2, i1 * i1 + i2 * i2, i1 * j1 + i2 * j2});

  if (pairs.size() * 81ull > 100000000ull)
    throw ScaleTooLarge("overlap grid exceeds 1e8 candidate evaluations");

  auto cell_key = [&](int64_t si, int64_t sj, int64_t cq, int64_t cp) {
    return (static_cast<u64>(si) << 48) ^ (static_cast<u64>(sj) << 32) ^
           (static_cast<u64>(cq & 0xffff) << 16) ^ static_cast<u64>(cp & 0xffff);
  };
  std::unordered_map<u64, std::vector<uint32_t>> buckets;
  buckets.reserve(pairs.size());
  for (uint32_t idx = 0; idx < pairs.size(); ++idx) {
    const PairSum& p = pairs[idx];
    buckets[cell_key(p.si, p.sj, p.sq / delta_inv, p.sp / delta_inv)].push_back(idx);
  }

  OverlapReport report;
  report.pair_count = pairs.size();
  for (uint32_t a = 0; a < pairs.size(); ++a) {
    const PairSum& pa = pairs[a];
    const int64_t cq = pa.sq / delta_inv;
    const int64_t cp = pa.sp / delta_inv;
    for (int dsi = -1; dsi <= 1; ++dsi)
      for (int dsj = -1; dsj <= 1; ++dsj)
        for (int dcq = -1; dcq <= 1; ++dcq)
          for (int dcp = -1; dcp <= 1; ++dcp) {
            auto it = buckets.find(cell_key(pa.si + dsi, pa.sj + dsj, cq + dcq, cp + dcp));
            if (it == buckets.end()) continue;
            for (uint32_t b : it->second) {
              if (b >= a) continue;  // unordered comparison; ratio is symmetric
              const PairSum& pb = pairs[b];
              if (std::abs(pa.si - pb.si) > 1 || std::abs(pa.sj - pb.sj) > 1 ||
                  std::abs(pa.sq - pb.sq) > delta_inv || std::abs(pa.sp - pb.sp) > delta_inv)
                continue;
              ++report.near_collisions;
              const double r1 = std::abs(pa.i1 - pb.i1) / static_cast<double>(k);
              const double r2 = std::abs(pa.i2 - pb.i2) / static_cast<double>(k);
              const double t1 = std::abs(pa.j1 - pb.j1) / static_cast<double>(k) / k;
              const double t2 = std::abs(pa.j2 - pb.j2) / static_cast<double>(k) / k;
              report.max_ratio = std::max({report.max_ratio, r1, r2, t1, t2});
            }
          }
  }
  return report;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw DegenerateInput("slope fit needs at least 3 samples");
  double prev_n = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, value] : samples) {
    if (n <= prev_n) throw DegenerateInput("N values must be strictly increasing");
    if (value <= 0) throw DegenerateInput("counts must be positive");
    prev_n = n;
    const double lx = std::log(n);
    const double ly = std::log(value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(samples.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0) throw DegenerateInput("degenerate abscissas");
  FitResult fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  for (const auto& [n, value] : samples) {
    const double r = std::abs(std::log(value) - (fit.intercept + fit.slope * std::log(n)));
    fit.max_residual = std::max(fit.max_residual, r);
  }
  return fit;
}

FitResult fit_exponent_counts(const std::vector<std::pair<long, BigInt>>& samples) {
  std::vector<std::pair<double, double>> converted;
  converted.reserve(samples.size());
  for (const auto& [n, count] : samples)
    converted.emplace_back(static_cast<double>(n), count.get_d());
  return fit_exponent(converted);
}

bool is_canonical_parabolic(const formalg::FormPair& pair) {
  return pair == formalg::parse_pair("r^2", "s^2+r*t");
}

CountRecord count_auto(const formalg::FormPair& pair, long n, int s, const EnergyOptions& opts) {
  if (s == 2 && is_canonical_parabolic(pair)) return fast_count_parabolic(n);
  auto points = surface_points(pair, n);
  return energy_count(points, s, opts);
}

}  // namespace qpdec::counting
