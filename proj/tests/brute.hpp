#pragma once
// Independent brute-force references used by the tests. Nothing here calls
// the library code it is compared against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "lipemb/core.hpp"
#include "lipemb/fields.hpp"
#include "lipemb/hierarchy.hpp"

namespace brute {

using lipemb::Point;
using lipemb::Rect;

// Exact level-0 class counts over all 2^(M0^2) blocks, by enumeration:
// {good, zero, one}. Only for M0 <= 4.
struct ClassCounts {
  std::uint64_t good = 0, zero = 0, one = 0, total = 0;
};
inline ClassCounts enumerate_y0_blocks(int M0) {
  const int N = M0 * M0;
  const std::int64_t t = (N + 2) / 3;  // at least a third of each symbol
  ClassCounts c;
  for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << N); ++pat) {
    std::int64_t ones = 0;
    for (int i = 0; i < N; ++i) ones += (pat >> i) & 1;
    const std::int64_t zeros = N - ones;
    if (ones >= t && zeros >= t) ++c.good;
    else if (zeros > ones) ++c.zero;
    else ++c.one;
    ++c.total;
  }
  return c;
}

// P[good] for M0^2 fair bits, as a long double binomial sum.
inline long double y0_good_probability(int M0) {
  const int N = M0 * M0;
  const int t = (N + 2) / 3;
  long double sum = 0;
  long double logc = 0;  // log C(N, k)
  for (int k = 0; k <= N; ++k) {
    if (k > 0) logc += std::log(static_cast<long double>(N - k + 1)) - std::log(static_cast<long double>(k));
    if (k >= t && N - k >= t) sum += std::exp(logc - N * std::log(2.0L));
  }
  return sum;
}

// Flood fill of the kept-edge graph; returns per-cell labels in row-major
// order of first appearance.
inline std::vector<int> flood_fill(Rect w, const std::vector<std::uint8_t>& right,
                                   const std::vector<std::uint8_t>& up) {
  const auto W = w.width(), H = w.height();
  std::vector<int> lab(static_cast<std::size_t>(W * H), -1);
  int next = 0;
  for (std::int64_t s = 0; s < W * H; ++s) {
    if (lab[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<std::int64_t> q;
    q.push(s);
    lab[static_cast<std::size_t>(s)] = next;
    while (!q.empty()) {
      const std::int64_t i = q.front();
      q.pop();
      const std::int64_t x = i % W, y = i / W;
      auto go = [&](std::int64_t k) {
        if (lab[static_cast<std::size_t>(k)] < 0) {
          lab[static_cast<std::size_t>(k)] = next;
          q.push(k);
        }
      };
      if (x + 1 < W && right[static_cast<std::size_t>(i)]) go(i + 1);
      if (x > 0 && right[static_cast<std::size_t>(i - 1)]) go(i - 1);
      if (y + 1 < H && up[static_cast<std::size_t>(i)]) go(i + W);
      if (y > 0 && up[static_cast<std::size_t>(i - W)]) go(i - W);
    }
    ++next;
  }
  return lab;
}

// Two labelings describe the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<std::int32_t>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = i + 1; k < a.size(); ++k)
      if ((a[i] == a[k]) != (b[i] == b[k])) return false;
  return true;
}

inline std::int64_t fdiv(std::int64_t a, std::int64_t b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

// Lower cell c against a lattice block H of n-cells with buffer w: is every
// cell within L-inf distance w inside H's cells (interior), or is some cell
// within distance w inside (blow-up)?
inline bool in_interior(const std::vector<Point>& H, Point c, std::int64_t n, std::int64_t w) {
  for (std::int64_t dy = -w; dy <= w; dy += (w ? w : 1))
    for (std::int64_t dx = -w; dx <= w; dx += (w ? w : 1)) {
      const Point u{fdiv(c.x + dx, n), fdiv(c.y + dy, n)};
      if (!std::binary_search(H.begin(), H.end(), u)) return false;
    }
  // The ball's corner cells cover every cell index it can meet when w < n;
  // the centre row/column cells lie between them.
  return true;
}
inline bool in_blowup(const std::vector<Point>& H, Point c, std::int64_t n, std::int64_t w) {
  for (std::int64_t dy = -w; dy <= w; ++dy)
    for (std::int64_t dx = -w; dx <= w; ++dx) {
      const Point u{fdiv(c.x + dx, n), fdiv(c.y + dy, n)};
      if (std::binary_search(H.begin(), H.end(), u)) return true;
    }
  return false;
}

// Exhaustive filter over every injection of the X sites into the Y sites.
inline bool exists_embedding(const lipemb::BitField& x, const lipemb::BitField& y, std::int64_t M) {
  std::vector<Point> xs, ys;
  for (std::int64_t j = 0; j < x.height; ++j)
    for (std::int64_t i = 0; i < x.width; ++i) xs.push_back({x.origin.x + i, x.origin.y + j});
  for (std::int64_t j = 0; j < y.height; ++j)
    for (std::int64_t i = 0; i < y.width; ++i) ys.push_back({y.origin.x + i, y.origin.y + j});
  std::vector<std::size_t> pick(xs.size(), 0);
  // Odometer over all |Y|^|X| tuples; non-injective ones are skipped.
  const std::size_t ny = ys.size();
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < xs.size() && ok; ++i) {
      if (x.at(xs[i]) != y.at(ys[pick[i]])) ok = false;
      for (std::size_t k = 0; k < i && ok; ++k) {
        if (pick[i] == pick[k]) ok = false;
        const Point dx = xs[i] - xs[k], dy = ys[pick[i]] - ys[pick[k]];
        if (dy.x * dy.x + dy.y * dy.y > M * M * (dx.x * dx.x + dx.y * dx.y)) ok = false;
      }
    }
    if (ok) return true;
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == ny) pick[i++] = 0;
    if (i == pick.size()) return false;
  }
}

}  // namespace brute
