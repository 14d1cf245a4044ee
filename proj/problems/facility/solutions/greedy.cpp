// Baseline: biggest factory first, each where it adds the least new
// discontent. Ties go to the smallest (y, x).
#include <algorithm>
#include <cstdio>
#include <numeric>
#include <vector>

int main() {
  int w, h, k;
  if (std::scanf("%d %d %d", &w, &h, &k) != 3) return 1;
  std::vector<long long> r(k);
  for (auto& v : r) std::scanf("%lld", &v);
  std::vector<long long> c(static_cast<size_t>(w) * h);
  for (auto& v : c) std::scanf("%lld", &v);

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return r[a] > r[b]; });

  std::vector<char> taken(c.size(), 0);
  std::vector<int> bx(k), by(k);
  std::vector<long long> pre(static_cast<size_t>(w + 1) * h);
  for (int f : order) {
    for (int y = 0; y < h; ++y) {
      long long* row = &pre[static_cast<size_t>(y) * (w + 1)];
      row[0] = 0;
      for (int x = 0; x < w; ++x) row[x + 1] = row[x] + (taken[y * w + x] ? 0 : c[y * w + x]);
    }
    std::vector<long long> half(r[f] + 1);
    for (long long d = 0; d <= r[f]; ++d) {
      long long s = 0;
      while ((s + 1) * (s + 1) <= r[f] * r[f] - d * d) ++s;
      half[d] = s;
    }
    long long best = -1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        long long sum = 0;
        for (long long yy = std::max(0LL, y - r[f]); yy <= std::min<long long>(h - 1, y + r[f]); ++yy) {
          const long long s = half[yy > y ? yy - y : y - yy];
          const long long x0 = std::max(0LL, x - s), x1 = std::min<long long>(w - 1, x + s);
          sum += pre[yy * (w + 1) + x1 + 1] - pre[yy * (w + 1) + x0];
        }
        if (best < 0 || sum < best) best = sum, bx[f] = x, by[f] = y;
      }
    }
    for (long long yy = std::max(0LL, by[f] - r[f]); yy <= std::min<long long>(h - 1, by[f] + r[f]); ++yy) {
      for (long long xx = std::max(0LL, bx[f] - r[f]); xx <= std::min<long long>(w - 1, bx[f] + r[f]); ++xx) {
        const long long dx = xx - bx[f], dy = yy - by[f];
        if (dx * dx + dy * dy <= r[f] * r[f]) taken[yy * w + xx] = 1;
      }
    }
  }
  for (int i = 0; i < k; ++i) std::printf("%d %d\n", bx[i], by[i]);
}
