// Every factory in the corner. Feasible, rarely good.
#include <cstdio>

int main() {
  int w, h, k;
  if (std::scanf("%d %d %d", &w, &h, &k) != 3) return 1;
  for (int i = 0; i < k; ++i) std::printf("0 0\n");
}
