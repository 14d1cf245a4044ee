// Burns argv[1] milliseconds of CPU time, then prints "done".
#include <cstdio>
#include <cstdlib>
#include <ctime>

int main(int argc, char** argv) {
  const double target = std::atof(argc > 1 ? argv[1] : "500") / 1000.0;
  volatile unsigned long x = 0;
  while (static_cast<double>(std::clock()) / CLOCKS_PER_SEC < target) {
    for (int i = 0; i < 10000; ++i) x = x + 1;
  }
  std::puts("done");
}
