// Forks without bound, then reports how many children it got.
#include <unistd.h>
#include <cstdio>

int main() {
  int ok = 0;
  for (int i = 0; i < 100000; ++i) {
    pid_t p = fork();
    if (p == 0) {
      pause();
      _exit(0);
    }
    if (p < 0) break;
    ++ok;
  }
  std::printf("%d\n", ok);
  std::fflush(stdout);
  return 0;
}
